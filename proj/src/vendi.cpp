#include "biasaudit/vendi.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>

#include "biasaudit/errors.hpp"
#include "biasaudit/tfidf.hpp"

namespace biasaudit {

namespace {
constexpr double kPsdSlack = 1e-9;      // eigenvalues above -1e-9 count as zero
constexpr double kSymmetryTol = 1e-12;
constexpr double kTraceTol = 1e-9;
} // namespace

Eigen::MatrixXd caption_similarity(const std::vector<std::string>& captions) {
    if (captions.empty()) throw EmptyInput("caption_similarity needs captions");
    const auto vectors = tfidf_vectorize(captions);
    const auto n = static_cast<Eigen::Index>(captions.size());
    Eigen::MatrixXd sim(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        sim(i, i) = 1.0;
        for (Eigen::Index j = i + 1; j < n; ++j) {
            const double c = cosine(vectors[static_cast<std::size_t>(i)],
                                    vectors[static_cast<std::size_t>(j)]);
            sim(i, j) = c;
            sim(j, i) = c;
        }
    }
    return sim;
}

Eigen::MatrixXd similarity_kernel(const Eigen::MatrixXd& similarity) {
    if (similarity.rows() == 0 || similarity.rows() != similarity.cols())
        throw AuditError("similarity matrix must be square and non-empty");
    return similarity / static_cast<double>(similarity.rows());
}

void validate_kernel(const Eigen::MatrixXd& kernel) {
    const auto n = kernel.rows();
    if (n == 0 || n != kernel.cols()) throw AuditError("kernel must be square");
    const double inv_n = 1.0 / static_cast<double>(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        if (std::abs(kernel(i, i) - inv_n) > kTraceTol)
            throw AuditError("kernel diagonal must equal 1/n");
        for (Eigen::Index j = i + 1; j < n; ++j)
            if (std::abs(kernel(i, j) - kernel(j, i)) > kSymmetryTol)
                throw AuditError("kernel must be symmetric");
    }
    if (std::abs(kernel.trace() - 1.0) > kTraceTol)
        throw AuditError("kernel trace must be 1");
}

VendiResult vendi_from_similarity(const Eigen::MatrixXd& similarity) {
    const Eigen::MatrixXd kernel = similarity_kernel(similarity);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(kernel,
                                                          Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success)
        throw AuditError("eigendecomposition failed");
    Eigen::VectorXd lambda = solver.eigenvalues();

    double sum = 0.0;
    for (Eigen::Index i = 0; i < lambda.size(); ++i) {
        if (lambda(i) < -kPsdSlack)
            throw AuditError("kernel is not positive semi-definite");
        if (lambda(i) < 0.0) lambda(i) = 0.0;
        sum += lambda(i);
    }
    if (sum <= 0.0) throw AuditError("kernel spectrum vanished");
    lambda /= sum; // renormalise to a probability spectrum

    double entropy = 0.0;
    for (Eigen::Index i = 0; i < lambda.size(); ++i)
        if (lambda(i) > 0.0) entropy -= lambda(i) * std::log(lambda(i));

    VendiResult result;
    result.raw = std::exp(entropy);
    result.normalised = result.raw / static_cast<double>(similarity.rows());
    return result;
}

VendiResult vendi_score(const std::vector<std::string>& captions) {
    if (captions.empty()) throw EmptyInput("vendi_score needs captions");
    return vendi_from_similarity(caption_similarity(captions));
}

} // namespace biasaudit
