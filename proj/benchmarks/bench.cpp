#include <benchmark/benchmark.h>

#include "qtheta/corpus.hpp"
#include "qtheta/multiplier.hpp"

using namespace qtheta;

namespace {

Multiplier jacobi() {
  QuantParam P = QuantParam::trivial(1);
  return Multiplier(P, {HeisElement(P, UnitMonomial::u_power(2), TorusPoint({UnitMonomial::u_power(4)}), {1})},
                    PairingMatrix{{UnitMonomial::u_power(2)}});
}

// (sum_k q^{k^2} t^k)^2 truncated at u-order 2N
void BM_SeriesProduct(benchmark::State& st) {
  const int64_t N = st.range(0);
  Series a;
  for (int64_t k = 0; k * k <= N; ++k) a = a + Series(UnitMonomial::u_power(2 * k * k));
  a = a.truncated(2 * N);
  for (auto _ : st) benchmark::DoNotOptimize(a * a);
}
BENCHMARK(BM_SeriesProduct)->Arg(40)->Arg(160)->Arg(640);

void BM_EqCoefficients(benchmark::State& st) {
  for (auto _ : st) benchmark::DoNotOptimize(e_q_coefficients(st.range(0)));
}
BENCHMARK(BM_EqCoefficients)->Arg(16)->Arg(64);

void BM_ThetaBasis(benchmark::State& st) {
  Multiplier J = jacobi();
  for (auto _ : st) benchmark::DoNotOptimize(theta_dim_basis(J));
}
BENCHMARK(BM_ThetaBasis);

void BM_EvaluateTheta(benchmark::State& st) {
  Multiplier J = jacobi();
  TorusSeries th = theta_dim_basis(J).basis[0];
  for (auto _ : st) benchmark::DoNotOptimize(evaluate(th, 8, 2 * st.range(0)));
}
BENCHMARK(BM_EvaluateTheta)->Arg(40)->Arg(160);

void BM_Verify(benchmark::State& st, const char* id) {
  for (auto _ : st) benchmark::DoNotOptimize(verify_named(id));
}
BENCHMARK_CAPTURE(BM_Verify, jacobi, "E012")->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Verify, q_exponential, "E016R")->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Verify, tq_identity, "E025")->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
