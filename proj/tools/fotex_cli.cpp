// fotex: command-line front end.
//
// Exit codes: 0 success / affirmative verdict, 1 negative verdict or
// domain error, 2 input error, 3 numerical tolerance failure.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <numbers>
#include <random>
#include <string>
#include <thread>

#include "CLI11.hpp"

#include "fotex/fotex.hpp"

using namespace fotex;

namespace {

enum Exit { kOk = 0, kNegative = 1, kInput = 2, kTolerance = 3 };

void warn(const std::string& msg) { std::cerr << "fotex: " << msg << "\n"; }

void emit(const json& j) { std::cout << j.dump(2) << "\n"; }

unsigned sweep_threads() {
  unsigned n = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("FOTEX_THREADS")) {
    try {
      const int cap = std::stoi(env);
      if (cap >= 1) n = std::min(n, static_cast<unsigned>(cap));
    } catch (const std::exception&) {
      warn(std::string("ignoring FOTEX_THREADS=") + env);
    }
  }
  return n;
}

std::vector<SymmetryClass> parse_symmetries(const std::string& s) {
  if (s == "all") return {SymmetryClass::Triclinic, SymmetryClass::Orthotropic};
  return {parse_symmetry(s)};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fourth-order fiber-orientation tensors: realizability checks, extremization, decomposition"};
  app.require_subcommand(1);

  // check
  auto* check = app.add_subcommand("check", "candidate test for a tensor file");
  std::string check_in;
  double check_tol = kCandidateTol;
  check->add_option("input", check_in, "tensor file")->required();
  check->add_option("--tol", check_tol, "tolerance");

  // from-fibers
  auto* fibers = app.add_subcommand("from-fibers", "orientation tensor of a discrete fiber measure");
  std::string fib_in, fib_out;
  int fib_order = 4;
  std::string fib_format = kFormatKm;
  fibers->add_option("input", fib_in, "fiber CSV (weight,p_x,p_y,p_z)")->required();
  fibers->add_option("--order", fib_order, "tensor order")->check(CLI::IsMember({2, 4}));
  fibers->add_option("--format", fib_format, "output format")->check(CLI::IsMember({kFormatKm, kFormatCoeffs}));
  fibers->add_option("--out", fib_out, "output tensor file");

  // extremize
  auto* ext = app.add_subcommand("extremize", "maximize n(x)4 :: A over candidates with given eigenvalues");
  double ext_l1 = 0, ext_l2 = 0, ext_phi = 0, ext_theta = 90;
  std::string ext_sym = "triclinic", ext_out;
  ext->add_option("--lambda1", ext_l1)->required();
  ext->add_option("--lambda2", ext_l2)->required();
  ext->add_option("--phi-deg", ext_phi, "azimuth in the eigensystem");
  ext->add_option("--theta-deg", ext_theta, "polar angle from v3");
  ext->add_option("--symmetry", ext_sym)->check(CLI::IsMember({"triclinic", "orthotropic"}));
  ext->add_option("--out", ext_out, "optimizer tensor file");

  // sweep
  auto* swp = app.add_subcommand("sweep", "extremize over a grid of directions (CSV)");
  double swp_l1 = 0, swp_l2 = 0;
  bool swp_planar = false;
  int swp_grid = 0;
  std::string swp_sym = "all", swp_out;
  swp->add_option("--lambda1", swp_l1)->required();
  auto* swp_l2_opt = swp->add_option("--lambda2", swp_l2);
  swp->add_flag("--planar", swp_planar, "directions in the v1-v2 plane, lambda2 = 1 - lambda1");
  swp->add_option("--grid", swp_grid, "points per angle (default 31, planar 91)")->check(CLI::Range(2, 100000));
  swp->add_option("--symmetry", swp_sym)->check(CLI::IsMember({"all", "triclinic", "orthotropic"}));
  swp->add_option("--out", swp_out, "CSV output (default stdout)");

  // realize
  auto* rea = app.add_subcommand("realize", "decompose a candidate into at most 15 fiber atoms");
  std::string rea_in, rea_out;
  RealizeOptions rea_opt;
  rea->add_option("input", rea_in, "tensor file")->required();
  rea->add_option("--grid", rea_opt.grid_size, "dictionary size")->check(CLI::Range(20, 1000000));
  rea->add_option("--tol", rea_opt.tol, "residual tolerance");
  rea->add_option("--out", rea_out, "fiber CSV output");

  // sos
  auto* sos = app.add_subcommand("sos", "sum-of-squares certificate for the quartic form of a tensor");
  std::string sos_in;
  sos->add_option("input", sos_in, "tensor file")->required();

  // sample
  auto* smp = app.add_subcommand("sample", "random test data");
  std::uint64_t smp_seed = 0;
  int smp_fibers = 0;
  std::string smp_out;
  smp->add_option("--seed", smp_seed, "random seed");
  smp->add_option("--fibers", smp_fibers, "write a random measure with this many atoms instead of an extreme candidate")
      ->check(CLI::Range(1, 1000000));
  smp->add_option("--out", smp_out, "output file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kInput;
  }

  try {
    if (*check) {
      const TensorFile tf = read_tensor_file(check_in);
      const CandidateReport rep = check_candidate(tf.km, check_tol);
      emit(report_json(rep));
      return rep.is_candidate ? kOk : kNegative;
    }

    if (*fibers) {
      const FiberMeasure m = read_fiber_file(fib_in, warn);
      const PropertyReport props = check_properties(m);
      const json tensor = fib_order == 2 ? tensor_json(props.a2) : tensor_json(props.a4, Frame::Fixed, fib_format);
      if (!fib_out.empty()) write_json_file(fib_out, tensor);
      emit({{"tensor", tensor}, {"properties", report_json(props)}, {"atoms", m.atoms.size()}});
      return kOk;
    }

    if (*ext) {
      const double deg = std::numbers::pi / 180.0;
      const ExtremeResult r = extremize(ext_l1, ext_l2, Direction::spherical(ext_phi * deg, ext_theta * deg),
                                        parse_symmetry(ext_sym));
      const json tensor = tensor_json(r.tensor, Frame::Eigen);
      if (!ext_out.empty()) write_json_file(ext_out, tensor);
      emit({{"value", r.value}, {"tensor", tensor}, {"solver", report_json(r.solution)}});
      return kOk;
    }

    if (*swp) {
      if (swp_planar) {
        const double implied = 1.0 - swp_l1;
        if (swp_l2_opt->count() > 0 && std::abs(swp_l2 - implied) > 1e-12) {
          warn("--planar requires lambda2 = 1 - lambda1, got lambda2 = " + fmt17(swp_l2));
          return kInput;
        }
        swp_l2 = implied;
      } else if (swp_l2_opt->count() == 0) {
        warn("--lambda2 is required without --planar");
        return kInput;
      }
      const SweepGrid grid = swp_planar ? SweepGrid::plane(swp_grid > 0 ? swp_grid : 91)
                                        : SweepGrid::sphere(swp_grid > 0 ? swp_grid : 31, swp_grid > 0 ? swp_grid : 31);
      const SweepResult r = sweep(swp_l1, swp_l2, grid, parse_symmetries(swp_sym), sweep_threads());
      if (swp_out.empty()) {
        write_sweep_csv(std::cout, r);
      } else {
        std::ofstream out(swp_out);
        if (!out) throw ParseError("cannot write '" + swp_out + "'");
        write_sweep_csv(out, r);
        emit({{"nodes", r.nodes.size()}, {"failed_nodes", r.failures()}, {"solver_iterations", r.total_iterations()},
              {"out", swp_out}});
      }
      if (r.failures() > 0) {
        warn(std::to_string(r.failures()) + " grid nodes failed (NaN)");
        return kTolerance;
      }
      return kOk;
    }

    if (*rea) {
      const Sym4 a = read_tensor_file(rea_in).tensor(1e-9);
      const RealizationResult r = realize(a, rea_opt);
      if (!rea_out.empty()) {
        std::ofstream out(rea_out);
        if (!out) throw ParseError("cannot write '" + rea_out + "'");
        write_fiber_csv(out, r.measure);
      }
      emit(report_json(r));
      if (!r.tolerance_reached) {
        warn("residual " + fmt17(r.residual) + " above tolerance " + fmt17(rea_opt.tol));
        return kTolerance;
      }
      return kOk;
    }

    if (*sos) {
      const Sym4 b = read_tensor_file(sos_in).tensor(1e-9);
      const SosResult r = sos_certificate(b);
      emit(report_json(r));
      return r.feasible ? kOk : kNegative;
    }

    if (*smp) {
      std::ostringstream text;
      if (smp_fibers > 0) {
        std::mt19937_64 rng(smp_seed);
        std::normal_distribution<double> nd(0.0, 1.0);
        std::uniform_real_distribution<double> ud(0.0, 1.0);
        FiberMeasure m;
        for (int i = 0; i < smp_fibers; ++i) {
          const double w = ud(rng);
          const double x = nd(rng), y = nd(rng), z = nd(rng);
          m.atoms.push_back({w, Direction::normalized(Vec3(x, y, z))});
        }
        write_fiber_csv(text, m.normalized());
      } else {
        text << tensor_json(sample_extreme_candidate(smp_seed)).dump(2) << "\n";
      }
      if (smp_out.empty()) {
        std::cout << text.str();
      } else {
        std::ofstream out(smp_out);
        if (!out) throw ParseError("cannot write '" + smp_out + "'");
        out << text.str();
      }
      return kOk;
    }
  } catch (const OrderingViolation& e) {
    warn(e.what());
    return kNegative;
  } catch (const NotCandidate& e) {
    warn(e.what());
    return kNegative;
  } catch (const ParseError& e) {
    warn(e.what());
    return kInput;
  } catch (const InvalidMeasure& e) {
    warn(e.what());
    return kInput;
  } catch (const EmptyMeasure& e) {
    warn(e.what());
    return kInput;
  } catch (const NotCompletelySymmetric& e) {
    warn(e.what());
    return kInput;
  } catch (const Error& e) {
    warn(e.what());
    return kTolerance;
  }
  return kOk;
}
