#pragma once

#include <Eigen/Dense>

#include <string>
#include <vector>

namespace biasaudit {

// Pairwise TF-IDF cosine similarities with the diagonal forced to exactly 1
// (a caption is always fully similar to itself, even when its token set is
// empty and its vector has norm 0).
Eigen::MatrixXd caption_similarity(const std::vector<std::string>& captions);

// Trace-one kernel K = S / n. Symmetric PSD by construction when S is a
// Gram-style similarity matrix with unit diagonal.
Eigen::MatrixXd similarity_kernel(const Eigen::MatrixXd& similarity);

// Sanity check for kernel invariants: symmetry within 1e-12, diagonal 1/n,
// trace 1 +- 1e-9. Throws AuditError on violation.
void validate_kernel(const Eigen::MatrixXd& kernel);

struct VendiResult {
    double raw = 0.0;        // effective number of distinct captions, [1, n]
    double normalised = 0.0; // raw / n, (0, 1]
};

// Spectrum entropy of the kernel: eigenvalues are clamped at zero (tolerance
// -1e-9 for numerical PSD slack), renormalised to sum one, and
// VS = exp(-sum lambda ln lambda) with 0 ln 0 := 0.
VendiResult vendi_from_similarity(const Eigen::MatrixXd& similarity);

// End-to-end caption diversity: TF-IDF cosine kernel over the given captions.
// Throws EmptyInput when the list is empty.
VendiResult vendi_score(const std::vector<std::string>& captions);

} // namespace biasaudit
