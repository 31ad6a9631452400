#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <string>
#include <vector>

#include "biasaudit/errors.hpp"

namespace biasaudit {

// Counts over a fixed, ordered class set. Class order is the declared order
// from the lexicon configuration and is significant (tie-breaking, output
// ordering), so it is carried along with the counts.
struct GroupDistribution {
    std::vector<std::string> class_names;
    std::vector<std::int64_t> counts;

    GroupDistribution() = default;
    GroupDistribution(std::vector<std::string> names, std::vector<std::int64_t> cnts)
        : class_names(std::move(names)), counts(std::move(cnts)) {
        if (class_names.size() != counts.size())
            throw AuditError("class/count arity mismatch");
        for (auto c : counts)
            if (c < 0) throw AuditError("negative class count");
    }

    std::int64_t total() const {
        std::int64_t n = 0;
        for (auto c : counts) n += c;
        return n;
    }

    std::size_t size() const { return class_names.size(); }

    // Proportions p_j = counts_j / n. Throws EmptyDistribution when n == 0.
    Eigen::VectorXd proportions() const {
        const auto n = total();
        if (n <= 0) throw EmptyDistribution();
        Eigen::VectorXd p(static_cast<Eigen::Index>(counts.size()));
        for (std::size_t j = 0; j < counts.size(); ++j)
            p(static_cast<Eigen::Index>(j)) =
                static_cast<double>(counts[j]) / static_cast<double>(n);
        return p;
    }

    // Number of classes with a nonzero count.
    int support() const {
        int s = 0;
        for (auto c : counts) s += (c > 0) ? 1 : 0;
        return s;
    }

    // Sub-distribution over `keep`, in the order given. Classes absent from
    // this distribution get a zero count.
    GroupDistribution restricted_to(const std::vector<std::string>& keep) const {
        std::vector<std::int64_t> sub(keep.size(), 0);
        for (std::size_t j = 0; j < keep.size(); ++j) {
            for (std::size_t i = 0; i < class_names.size(); ++i) {
                if (class_names[i] == keep[j]) {
                    sub[j] = counts[i];
                    break;
                }
            }
        }
        return GroupDistribution(keep, std::move(sub));
    }

    bool operator==(const GroupDistribution&) const = default;
};

} // namespace biasaudit
