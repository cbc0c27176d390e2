#include "fowt/fft.hpp"

#include <fftw3.h>

#include <cstring>
#include <memory>
#include <mutex>

#include "fowt/error.hpp"

namespace fowt::fft {

namespace {

// FFTW planning is not reentrant; execution on a private plan is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

struct FftwFree {
  void operator()(void* p) const { fftw_free(p); }
};

template <class T>
std::unique_ptr<T[], FftwFree> fftw_buffer(std::size_t n) {
  auto* p = static_cast<T*>(fftw_malloc(sizeof(T) * n));
  require(p != nullptr, ErrorKind::Numerical, "fftw_malloc failed");
  return std::unique_ptr<T[], FftwFree>(p);
}

class Plan {
 public:
  explicit Plan(fftw_plan p) : plan_(p) {
    require(plan_ != nullptr, ErrorKind::Numerical, "FFTW plan creation failed");
  }
  ~Plan() {
    std::lock_guard<std::mutex> lock(planner_mutex());
    fftw_destroy_plan(plan_);
  }
  Plan(const Plan&) = delete;
  Plan& operator=(const Plan&) = delete;
  void execute() const { fftw_execute(plan_); }

 private:
  fftw_plan plan_;
};

}  // namespace

std::vector<std::complex<double>> forward_real(const std::vector<double>& x) {
  const std::size_t n = x.size();
  require(n >= 1, ErrorKind::Input, "forward_real needs a nonempty series");
  const std::size_t nc = n / 2 + 1;
  auto in = fftw_buffer<double>(n);
  auto out = fftw_buffer<fftw_complex>(nc);
  fftw_plan raw;
  {
    std::lock_guard<std::mutex> lock(planner_mutex());
    raw = fftw_plan_dft_r2c_1d(static_cast<int>(n), in.get(), out.get(), FFTW_ESTIMATE);
  }
  Plan plan(raw);
  std::memcpy(in.get(), x.data(), sizeof(double) * n);
  plan.execute();
  std::vector<std::complex<double>> result(nc);
  for (std::size_t k = 0; k < nc; ++k) result[k] = {out[k][0], out[k][1]};
  return result;
}

std::vector<double> inverse_real(const std::vector<std::complex<double>>& half, std::size_t n) {
  require(n >= 1, ErrorKind::Input, "inverse_real needs n >= 1");
  const std::size_t nc = n / 2 + 1;
  require(half.size() == nc, ErrorKind::Input, "inverse_real expects n/2+1 spectral bins");
  auto in = fftw_buffer<fftw_complex>(nc);
  auto out = fftw_buffer<double>(n);
  fftw_plan raw;
  {
    std::lock_guard<std::mutex> lock(planner_mutex());
    // c2r destroys its input, so plan and fill afterwards
    raw = fftw_plan_dft_c2r_1d(static_cast<int>(n), in.get(), out.get(), FFTW_ESTIMATE);
  }
  Plan plan(raw);
  for (std::size_t k = 0; k < nc; ++k) {
    in[k][0] = half[k].real();
    in[k][1] = half[k].imag();
  }
  plan.execute();
  return std::vector<double>(out.get(), out.get() + n);
}

}  // namespace fowt::fft
