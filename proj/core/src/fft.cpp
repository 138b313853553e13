#include "kgnr/fft.hpp"

#include <fftw3.h>

#include <cstddef>
#include <map>
#include <mutex>
#include <utility>

namespace kgnr::fft {

namespace {

std::mutex planner_mutex;

fftw_plan plan_for(int n, int sign) {
    static std::map<std::pair<int, int>, fftw_plan> plans;
    std::scoped_lock lock(planner_mutex);
    auto key = std::make_pair(n, sign);
    auto it = plans.find(key);
    if (it != plans.end()) return it->second;
    // Plan once on scratch storage, in place; later executions reuse the plan
    // on caller buffers via fftw_execute_dft.
    fftw_complex* scratch = fftw_alloc_complex(std::size_t(n) * std::size_t(n));
    fftw_plan plan = fftw_plan_dft_2d(n, n, scratch, scratch, sign,
                                      FFTW_ESTIMATE | FFTW_UNALIGNED);
    fftw_free(scratch);
    plans.emplace(key, plan);
    return plan;
}

void execute(int n, int sign, std::complex<double>* data) {
    fftw_plan plan = plan_for(n, sign);
    auto* raw = reinterpret_cast<fftw_complex*>(data);
    fftw_execute_dft(plan, raw, raw);
}

} // namespace

void forward(int n, std::complex<double>* data) { execute(n, FFTW_FORWARD, data); }

void backward(int n, std::complex<double>* data) { execute(n, FFTW_BACKWARD, data); }

} // namespace kgnr::fft
