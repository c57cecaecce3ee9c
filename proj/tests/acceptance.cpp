// One PASS/FAIL line per acceptance criterion; exit status 1 if any fails.

#include "ttofs/fsd.hpp"
#include "ttofs/linalg.hpp"
#include "ttofs/widom.hpp"

#include <json.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <thread>

using namespace ttofs;

namespace {

int failures = 0;

void report(int id, const char* title, bool pass, const std::string& detail) {
  std::printf("criterion %2d %-34s %s  %s\n", id, title, pass ? "PASS" : "FAIL", detail.c_str());
  std::fflush(stdout);
  if (!pass) ++failures;
}

std::string sci(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2e", x);
  return buf;
}

Symbol random_polynomial(std::mt19937_64& rng, int degree) {
  std::map<int, Complex> c;
  auto unit = [&rng] { return static_cast<double>(rng() >> 11) * 0x1.0p-53 * 2.0 - 1.0; };
  for (int j = -degree; j <= degree; ++j) c[j] = Complex(unit(), unit());
  return Symbol(c);
}

// Sixteen zeros with |λ| ≤ 0.9.
BlaschkeProduct moderate_zeros() {
  return BlaschkeProduct::from_zeros({{0.3, 0.0}, {0.0, 0.5}, {-0.7, 0.0}, {0.2, -0.6}, {0.85, 0.1}, {-0.4, -0.4},
                                     {0.6, 0.6}, {0.1, 0.1}, {-0.8, 0.3}, {0.05, -0.9}, {0.45, 0.0}, {0.0, -0.3},
                                     {-0.6, -0.5}, {0.7, -0.2}, {0.25, 0.75}, {-0.15, 0.55}});
}

Symbol positive_symbol() { return Symbol(std::map<int, Complex>{{-1, 0.5}, {0, 2.0}, {1, 0.5}}); }

SequenceSpec plain(BlaschkeProduct u, Symbol a) { return SequenceSpec{std::move(u), std::move(a), {}, {}}; }

// Residuals at rounding level cannot keep decreasing; below this floor a
// refinement step counts as converged.
constexpr double kFloor = 1e-13;

bool decreased(double coarse, double fine, double factor) { return fine * factor <= coarse || fine <= kFloor; }

void classical_reduction() {
  std::mt19937_64 rng(2024);
  double entry = 0.0;
  double residual = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const Symbol a = random_polynomial(rng, 1 + trial % 5);
    const Symbol b = random_polynomial(rng, 1 + (trial * 3) % 5);
    const std::size_t n = 1 + static_cast<std::size_t>(trial) % 16;
    const auto u = BlaschkeProduct::from_zeros(std::vector<Complex>(n, Complex(0.0, 0.0)));
    const Matrix t = tto_matrix(u, n, a, a.grid()).entries;
    entry = std::max(entry, (t - toeplitz_matrix(a, n).entries).cwiseAbs().maxCoeff());
    const double w = tto_widom_residual(u, a, b, n, 64).residual_spectral;
    const double c = classical_widom_residual(a, b, n, 64).spectral;
    residual = std::max(residual, std::abs(w - c));
  }
  report(1, "classical reduction", entry <= 1e-12 && residual <= 1e-12,
         "max entry diff " + sci(entry) + ", max residual diff " + sci(residual));
}

void widom_identity() {
  std::mt19937_64 rng(7);
  const auto u = BlaschkeProduct::geometric(0.5);
  double worst = 0.0;
  bool ordered = true;
  for (int trial = 0; trial < 5; ++trial) {
    const Symbol a = random_polynomial(rng, 4);
    const Symbol b = random_polynomial(rng, 4);
    for (std::size_t n : {4, 8, 16}) {
      const double fine = tto_widom_residual(u, a, b, n, 1024).residual_spectral;
      const double coarse = tto_widom_residual(u, a, b, n, 512).residual_spectral;
      worst = std::max(worst, fine);
      ordered = ordered && decreased(coarse, fine, 1.0);
    }
  }
  report(2, "Widom identity for TTOs", worst < 1e-8 && ordered,
         "max residual at N_F=1024 " + sci(worst) + (ordered ? ", N_F=1024 <= N_F=512" : ", N_F=1024 > N_F=512"));
}

void partial_isometry() {
  const auto u = moderate_zeros();
  double worst = 0.0;
  bool halves = true;
  std::string ladder;
  for (std::size_t n = 1; n <= 16; ++n) {
    const auto zeros = u.zeros(n);
    const auto at = [&](std::size_t window) { return hankel_isometry_check(blaschke_symbol(zeros, window), window); };
    const auto top = at(1024);
    worst = std::max({worst, top.range, top.initial});
    IsometryResiduals prev = at(32);
    for (std::size_t window = 64; window <= 1024; window *= 2) {
      const IsometryResiduals next = window == 1024 ? top : at(window);
      halves = halves && decreased(prev.range, next.range, 2.0) && decreased(prev.initial, next.initial, 2.0);
      if (n == 16) ladder += " " + sci(std::max(next.range, next.initial));
      prev = next;
    }
  }
  report(3, "partial isometry of R_{u_n}", worst < 1e-8 && halves,
         "max residual at N_F=1024 " + sci(worst) + ", n=16 ladder N_F=64..1024:" + ladder);
}

void filtration_laws() {
  const auto u = moderate_zeros();
  const std::size_t window = 256;
  std::vector<Matrix> e(17);
  double gram = 0.0;
  for (std::size_t n = 1; n <= 16; ++n) {
    const TMBasis basis = tm_basis(u, n, window, CircleGrid(1024));
    gram = std::max(gram, basis.gram_residual);
    e[n] = basis.embedding;
  }
  double product = 0.0;
  for (std::size_t m = 1; m <= 16; ++m) {
    for (std::size_t n = 1; n <= 16; ++n) {
      const std::size_t k = std::min(m, n);
      Matrix left(e[m].rows(), e[m].cols() + e[k].cols());
      Matrix right(e[n].rows(), e[n].cols() + e[k].cols());
      left << e[m], e[k];
      right << e[n], e[k];
      Matrix core = Matrix::Zero(left.cols(), right.cols());
      core.topLeftCorner(e[m].cols(), e[n].cols()) = e[m].adjoint() * e[n];
      core.bottomRightCorner(e[k].cols(), e[k].cols()) = -Matrix::Identity(e[k].cols(), e[k].cols());
      product = std::max(product, factored_norms(left, core, right).spectral);
    }
  }
  std::mt19937_64 rng(5);
  const Symbol a = random_polynomial(rng, 4);
  const auto geo = BlaschkeProduct::geometric(0.5);
  const Matrix big = tto_matrix(geo, 64, a, a.grid()).entries;
  bool nested = true;
  for (std::size_t m = 1; m < 64; ++m) {
    const auto mi = static_cast<Eigen::Index>(m);
    nested = nested && (tto_matrix(geo, m, a, a.grid()).entries.array() == big.topLeftCorner(mi, mi).array()).all();
  }
  report(4, "filtration laws", gram < 1e-10 && product < 1e-10 && nested,
         "Gram " + sci(gram) + ", max ||P_m P_n - P_min|| " + sci(product) + (nested ? ", nested sections equal" : ", nesting broken"));
}

void strong_convergence() {
  const auto u = BlaschkeProduct::geometric(0.5);
  const std::vector<std::size_t> ns{2, 4, 8, 16, 32};
  Vector x(3);
  x << Complex(1.0, 0.0), Complex(0.0, 0.5), Complex(-0.25, 0.0);
  bool ok = true;
  std::string detail;
  auto judge = [&](const std::string& name, const std::vector<double>& t) {
    const bool pass = nonincreasing_within(t, 0.1) && t.back() < 0.1 * t.front();
    ok = ok && pass;
    detail += name + " " + sci(t.front()) + "->" + sci(t.back()) + (pass ? "" : "(!)") + "; ";
  };
  judge("fwd", r_convergence_probe(u, x, ns, 2048, ProbeMode::Forward));
  judge("adj", r_convergence_probe(u, x, ns, 2048, ProbeMode::Adjoint));
  judge("refl", r_convergence_probe(u, x, ns, 2048, ProbeMode::ReflectedProjection));
  FiniteRankOperator l;
  l.terms.push_back({Complex(1.0, 0.0), x, x});
  judge("cor", corollary_convergence_residual(u, l, ns, 2048));
  report(5, "strong convergence probes", ok, detail);
}

void stability_criterion() {
  const std::vector<std::size_t> ns{4, 8, 16, 32, 64};
  const auto stable = stability_probe(plain(BlaschkeProduct::geometric(0.5), positive_symbol()), ns, 0.5);
  const double low = *std::min_element(stable.sigma_min_trace.begin(), stable.sigma_min_trace.end());
  const auto unstable = stability_probe(plain(BlaschkeProduct(AllZeroPrefix{1, GeometricRadius{0.5, {}}}), Symbol::monomial(1)), ns, 0.5);
  const double high = *std::max_element(unstable.sigma_min_trace.begin(), unstable.sigma_min_trace.end());
  const bool pass = low >= 1.0 - 1e-10 && stable.verdict == StabilityVerdict::Stable && high < 1e-10 &&
                    unstable.verdict == StabilityVerdict::Unstable;
  report(6, "stability criterion", pass,
         "positive: min sigma " + sci(low) + " " + to_string(stable.verdict) + "; shift: max sigma " + sci(high) + " " +
             to_string(unstable.verdict));
}

void spectral_approximation() {
  const auto rep = convergence_report(plain(BlaschkeProduct::geometric(0.5), positive_symbol()), {4, 8, 16, 32}, 64, {0.1},
                                      std::nullopt, std::max(1u, std::thread::hardware_concurrency()));
  bool ok = !rep.tracks.empty() && !rep.eigen_track_skipped;
  std::string detail;
  for (const auto& t : rep.tracks) {
    ok = ok && t.nonincreasing;
    detail += t.track + " " + sci(t.distances.front()) + "->" + sci(t.distances.back()) + "; ";
  }
  report(7, "spectral approximation", ok, detail);
}

void fredholm_gap() {
  const std::vector<std::size_t> ns{8, 16, 32, 64};
  bool ok = true;
  std::string detail;
  for (std::size_t rank : {0, 1, 2}) {
    SequenceSpec spec = plain(BlaschkeProduct::geometric(0.5), positive_symbol());
    for (std::size_t k = 0; k < rank; ++k) {
      Vector e = Vector::Zero(static_cast<Eigen::Index>(rank));
      e[static_cast<Eigen::Index>(k)] = 1.0;
      spec.compact.push_back({Complex(-1.0, 0.0), e, e, positive_symbol()});
    }
    const FredholmReport rep = fredholm_kernel_estimate(spec, ns);
    const RealVector& s = rep.singular_values.back();
    double history = 0.0;
    for (const auto& sv : rep.singular_values) history = std::max(history, sv.maxCoeff());
    const auto r = static_cast<Eigen::Index>(rank);
    bool pass = rep.k && *rep.k == rank;
    if (rank > 0) pass = pass && s[r - 1] < 1e-6 * s.maxCoeff() && s[r] > 0.1 * history;
    ok = ok && pass;
    detail += "k=" + (rep.k ? std::to_string(*rep.k) : std::string("none"));
    if (rank > 0) detail += " (sigma_k " + sci(s[r - 1]) + ", sigma_k+1 " + sci(s[r]) + ")";
    detail += "; ";
  }
  report(8, "Fredholm singular-value gap", ok, detail);
}

void shift_spectrum() {
  const std::vector<Complex> zeros{{0.3, 0.0}, {0.0, 0.5}, {-0.7, 0.0}};
  const auto u = BlaschkeProduct::from_zeros(zeros);
  const Matrix a = tto_matrix(u, 3, Symbol::monomial(1), CircleGrid(64)).entries;
  double worst = 0.0;
  for (const Complex& z : zeros) worst = std::max(worst, sigma_min(a - z * Matrix::Identity(3, 3)));
  report(9, "truncated-shift spectrum", worst < 1e-8, "max sigma_min(A_3 - lambda_j) " + sci(worst));
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream s;
  s << f.rdbuf();
  return s.str();
}

void determinism() {
  namespace fs = std::filesystem;
  const fs::path root = fs::temp_directory_path() / "ttofs_acceptance_determinism";
  fs::remove_all(root);
  fs::create_directories(root);
  const nlohmann::json config{{"kind", "pseudospectra"},
                              {"zeros", {{"family", "geometric-radius"}, {"ratio", 0.5}}},
                              {"symbol", "laurent:{-1: 0.5, 0: 2, 1: 1}"},
                              {"n_list", {8, 16}},
                              {"eps_list", {0.1}},
                              {"seed", 11},
                              {"perturbation", {{"rule", "geometric"}, {"scale", 0.01}, {"rate", 0.5}}},
                              {"parallel", true}};
  std::ofstream(root / "config.json") << config.dump(2);
  int status = 0;
  for (const char* run : {"a", "b"}) {
    const std::string cmd = "TTOFS_OUTPUT_DIR='" + (root / run).string() + "' '" TTOFS_CLI_PATH "' run '" +
                            (root / "config.json").string() + "' > /dev/null";
    status |= std::system(cmd.c_str());
  }
  std::size_t tables = 0;
  bool same = status == 0;
  for (const auto& entry : fs::directory_iterator(root / "a")) {
    if (entry.path().extension() != ".csv") continue;
    ++tables;
    const fs::path other = root / "b" / entry.path().filename();
    same = same && fs::exists(other) && slurp(entry.path()) == slurp(other);
  }
  report(10, "determinism", same && tables > 0,
         std::to_string(tables) + " tables compared" + (status == 0 ? "" : ", CLI exit status nonzero"));
}

}  // namespace

int main() {
  classical_reduction();
  widom_identity();
  partial_isometry();
  filtration_laws();
  strong_convergence();
  stability_criterion();
  spectral_approximation();
  fredholm_gap();
  shift_spectrum();
  determinism();
  std::printf("%d of 10 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
