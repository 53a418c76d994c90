#include "quantcal/isotonic.hpp"

#include "quantcal/errors.hpp"

namespace quantcal {

bool is_nondecreasing(const std::vector<double>& v) {
    for (std::size_t i = 1; i < v.size(); ++i) {
        if (v[i - 1] > v[i]) return false;
    }
    return true;
}

namespace {

struct Block {
    double sum;
    std::size_t count;

    double mean() const { return sum / static_cast<double>(count); }
};

} // namespace

std::vector<double> pava(const std::vector<double>& x) {
    const std::size_t n = x.size();
    // Fast path keeps sorted inputs bit-identical.
    if (is_nondecreasing(x)) return x;

    std::vector<Block> blocks;
    blocks.reserve(n);
    for (double v : x) {
        blocks.push_back({v, 1});
        // Merge while the previous block strictly dominates; ties stay split
        // so untouched entries keep their original representation.
        while (blocks.size() >= 2 &&
               blocks[blocks.size() - 2].mean() > blocks.back().mean()) {
            Block top = blocks.back();
            blocks.pop_back();
            blocks.back().sum += top.sum;
            blocks.back().count += top.count;
        }
    }

    std::vector<double> out;
    out.reserve(n);
    for (const Block& b : blocks) {
        if (b.count == 1) {
            // Singleton blocks were never pooled; emit the input value exactly.
            out.push_back(b.sum);
        } else {
            const double m = b.mean();
            out.insert(out.end(), b.count, m);
        }
    }
    return out;
}

std::vector<double> project_shifted(const std::vector<double>& x,
                                    const std::vector<double>& b) {
    if (x.size() != b.size())
        throw InputError("project_shifted: offset and shift sizes differ");
    std::vector<double> shifted(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) shifted[i] = x[i] + b[i];
    std::vector<double> pooled = pava(shifted);
    for (std::size_t i = 0; i < x.size(); ++i) pooled[i] -= b[i];
    return pooled;
}

std::vector<double> pava_eps_separated(const std::vector<double>& x, double eps) {
    if (eps < 0.0) throw InputError("pava_eps_separated: eps must be >= 0");
    if (eps == 0.0) return pava(x);
    std::vector<double> shifted(x.size());
    for (std::size_t i = 0; i < x.size(); ++i)
        shifted[i] = x[i] - static_cast<double>(i) * eps;
    std::vector<double> pooled = pava(shifted);
    for (std::size_t i = 0; i < pooled.size(); ++i)
        pooled[i] += static_cast<double>(i) * eps;
    return pooled;
}

std::vector<double> project_eps_separated(const std::vector<double>& x,
                                          const std::vector<double>& b,
                                          double eps) {
    if (x.size() != b.size())
        throw InputError("project_eps_separated: offset and shift sizes differ");
    if (eps < 0.0) throw InputError("project_eps_separated: eps must be >= 0");
    std::vector<double> shifted(x.size());
    for (std::size_t i = 0; i < x.size(); ++i)
        shifted[i] = x[i] + b[i] - static_cast<double>(i) * eps;
    std::vector<double> pooled = pava(shifted);
    for (std::size_t i = 0; i < pooled.size(); ++i)
        pooled[i] += static_cast<double>(i) * eps - b[i];
    return pooled;
}

} // namespace quantcal
