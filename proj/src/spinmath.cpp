#include "cissnv/spinmath.hpp"

#include <algorithm>

namespace cissnv {

ComplexMatrix partial_trace(const ComplexMatrix& rho, const SpinRegister& reg, const std::vector<std::size_t>& keep) {
    const int n = reg.dim();
    if (rho.rows() != n || rho.cols() != n)
        throw std::invalid_argument("partial_trace: state dimension does not match register");
    for (std::size_t k : keep)
        if (k >= reg.size()) throw std::invalid_argument("partial_trace: site index out of range");
    if (!std::is_sorted(keep.begin(), keep.end()) || std::adjacent_find(keep.begin(), keep.end()) != keep.end())
        throw std::invalid_argument("partial_trace: kept sites must be strictly increasing");

    const std::size_t ns = reg.size();
    std::vector<int> dims(ns), strides(ns);
    int stride = 1;
    for (std::size_t i = ns; i-- > 0;) {
        dims[i] = reg.site_dim(i);
        strides[i] = stride;
        stride *= dims[i];
    }
    std::vector<bool> kept(ns, false);
    for (std::size_t k : keep) kept[k] = true;

    int dk = 1;
    for (std::size_t k : keep) dk *= dims[k];

    // Reduced index of a full basis index, and the "traced" part used to match rows/cols.
    auto split = [&](int idx, int& red, int& env) {
        red = 0;
        env = 0;
        for (std::size_t i = 0; i < ns; ++i) {
            const int digit = (idx / strides[i]) % dims[i];
            if (kept[i])
                red = red * dims[i] + digit;
            else
                env = env * dims[i] + digit;
        }
    };

    std::vector<int> red(n), env(n);
    for (int i = 0; i < n; ++i) split(i, red[i], env[i]);

    ComplexMatrix out = ComplexMatrix::Zero(dk, dk);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (env[i] == env[j]) out(red[i], red[j]) += rho(i, j);
    return out;
}

} // namespace cissnv
