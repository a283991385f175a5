// Command line driver: exact Hecke-span computations on modular Jacobians.
//
// decompose     isotypic classes (newform Galois orbits) at one level
// verify-thm1   Hecke span vs the predicted Hom dimension for one pair
// verify-range  the same over every ordered pair up to a bound (CSV)
// cm32          the X_0(32) complex-multiplication example over Q(i)
// twist         twisting-operator construction and verification
// homdim        predicted Hom dimension only
// basefield     base field of a level structure with determinant restriction

#include <atomic>
#include <cstdlib>
#include <iostream>
#include <memory>
#include <mutex>
#include <thread>

#include "CLI11.hpp"
#include "json.hpp"

#include "heckespan/cache.hpp"
#include "heckespan/report.hpp"

using namespace heckespan;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitBadArgs = 1;
constexpr int kExitCheckFailed = 2;
constexpr int kExitUnsaturated = 3;
constexpr int kExitChecksum = 4;
constexpr int kExitNoTwist = 5;

struct GlobalOptions {
  std::string cache_dir;
  std::vector<int64_t> det_bounds{2, 4, 6, 8, 12};
  int64_t prime_bound = 13;
  std::string emit = "json";
  int threads = 0;
};

std::unique_ptr<Cache> open_cache(const GlobalOptions& opt) {
  if (opt.cache_dir.empty()) return nullptr;
  return std::make_unique<Cache>(opt.cache_dir);
}

// Store fresh payloads; verify bit-identity against warm entries.
void reconcile_cache(Cache* cache, const std::string& key, const json& fresh) {
  if (!cache) return;
  auto stored = cache->load(key);
  if (stored) {
    if (stored->dump() != fresh.dump())
      throw std::runtime_error("cache: warm entry differs from recomputation for key " + key);
  } else {
    cache->store(key, fresh);
  }
}

LevelGroup parse_level(int64_t N, const std::vector<int64_t>& h_gens) {
  if (h_gens.empty()) return LevelGroup::gamma0(N);
  return LevelGroup::gamma_h(N, h_gens);
}

int cmd_decompose(const GlobalOptions& opt, int64_t N, const std::vector<int64_t>& h_gens) {
  auto cache = open_cache(opt);
  LevelGroup level = parse_level(N, h_gens);
  auto space = build_space(level);
  const auto& classes = decompose_cached(level);
  json out = json::array();
  for (const IsotypicClass& cls : classes) {
    std::vector<InnerTwistDatum> twists;
    if (level.is_gamma0() && cls.new_level <= 256) {
      int64_t bound = 1;
      for (int64_t r = 2; r * r <= cls.new_level; ++r)
        if (cls.new_level % (r * r) == 0) bound = std::max(bound, twist_sturm_bound(cls.new_level, r));
      twists = inner_twists(cls, bound);
    }
    out.push_back(class_to_json(cls, twists));
  }
  json rep;
  rep["level"] = level_to_json(level);
  rep["cuspidal_dim"] = space->cuspidal_dim();
  rep["classes"] = out;
  if (cache) {
    reconcile_cache(cache.get(), "classes;" + level.key(), rep);
    if (space->dim() <= 400) reconcile_cache(cache.get(), level.key(), space_to_json(*space));
  }
  std::cout << rep.dump(1) << "\n";
  return kExitOk;
}

int cmd_verify_thm1(const GlobalOptions& opt, int64_t N, int64_t Nprime) {
  auto cache = open_cache(opt);
  VerifyThm1Report rep =
      verify_thm1(CompactOpen::gamma0(N), CompactOpen::gamma0(Nprime), opt.det_bounds);
  json j = verify_report_to_json(rep);
  if (cache) {
    json stable = j;
    stable.erase("elapsed_ms");
    reconcile_cache(cache.get(), "thm1;" + rep.source + "|" + rep.target, stable);
  }
  if (opt.emit == "csv")
    std::cout << verify_report_csv_header() << "\n" << verify_report_csv_row(rep) << "\n";
  else
    std::cout << j.dump(1) << "\n";
  return rep.saturated ? kExitOk : kExitUnsaturated;
}

int cmd_verify_range(const GlobalOptions& opt, int64_t max_level) {
  std::vector<std::pair<int64_t, int64_t>> pairs;
  for (int64_t N = 1; N <= max_level; ++N)
    for (int64_t Np = 1; Np <= max_level; ++Np) pairs.push_back({N, Np});

  // Warm the per-level data serially (decompositions write shared caches).
  for (int64_t N = 1; N <= max_level; ++N) decompose_gamma0(N);

  std::vector<VerifyThm1Report> reports(pairs.size());
  std::atomic<size_t> next{0};
  std::atomic<bool> failed{false};
  int nthreads = opt.threads > 0 ? opt.threads : (int)std::thread::hardware_concurrency();
  if (nthreads <= 0) nthreads = 4;
  std::vector<std::thread> pool;
  std::mutex err_mutex;
  std::string first_error;
  for (int t = 0; t < nthreads; ++t)
    pool.emplace_back([&] {
      while (true) {
        size_t i = next.fetch_add(1);
        if (i >= pairs.size()) return;
        try {
          reports[i] = verify_thm1(CompactOpen::gamma0(pairs[i].first),
                                   CompactOpen::gamma0(pairs[i].second), opt.det_bounds);
        } catch (const std::exception& e) {
          std::lock_guard<std::mutex> lock(err_mutex);
          if (first_error.empty()) first_error = e.what();
          failed = true;
          return;
        }
      }
    });
  for (auto& th : pool) th.join();
  if (failed) {
    std::cerr << "verify-range: " << first_error << "\n";
    return kExitCheckFailed;
  }

  size_t unsaturated = 0;
  std::cout << verify_report_csv_header() << "\n";
  for (const auto& rep : reports) {
    std::cout << verify_report_csv_row(rep) << "\n";
    if (!rep.saturated) ++unsaturated;
  }
  std::cerr << "verify-range: " << (pairs.size() - unsaturated) << "/" << pairs.size()
            << " pairs saturated\n";
  return unsaturated == 0 ? kExitOk : kExitUnsaturated;
}

int cmd_cm32(const GlobalOptions& opt) {
  auto cache = open_cache(opt);
  if (cache) {
    // Exercise the integrity path: a tampered space entry must fail loudly.
    auto space = build_space(LevelGroup::gamma0(32));
    reconcile_cache(cache.get(), space->level().key(), space_to_json(*space));
  }
  Cm32Report rep = cm32_example(opt.prime_bound);
  json j = cm32_report_to_json(rep);
  if (cache) {
    json stable = j;
    stable.erase("elapsed_ms");
    reconcile_cache(cache.get(), "cm32;prime_bound=" + std::to_string(opt.prime_bound), stable);
  }
  std::cout << j.dump(1) << "\n";
  return rep.pass ? kExitOk : kExitCheckFailed;
}

int run_twist_on(const GlobalOptions& opt, const IsotypicClass& cls, const InnerTwistDatum& tw) {
  auto setup = std::make_shared<const TwistSetup>(build_setup(cls, tw, opt.threads));
  TwistOperator op = build_X(setup);
  int64_t bound = twist_sturm_bound(cls.new_level, tw.char_modulus);
  TwistVerification rep = verify_twist_operator(op, bound, opt.threads);
  std::cout << twist_report_to_json(*setup, rep).dump(1) << "\n";
  return rep.pass ? kExitOk : kExitCheckFailed;
}

int cmd_twist(const GlobalOptions& opt, int64_t N, int64_t search_max) {
  if (N > 0) {
    const auto& classes = decompose_gamma0(N);
    bool found_cm_only = false;
    for (const IsotypicClass& cls : classes) {
      if (cls.new_level != N) continue;
      int64_t bound = 1;
      for (int64_t r = 2; r * r <= N; ++r)
        if (N % (r * r) == 0) bound = std::max(bound, twist_sturm_bound(N, r));
      for (const InnerTwistDatum& tw : inner_twists(cls, bound)) {
        if (tw.is_cm) {
          found_cm_only = true;
          continue;
        }
        return run_twist_on(opt, cls, tw);
      }
    }
    if (found_cm_only) {
      std::cerr << "twist: refused: the only twisted class at level " << N
                << " has complex multiplication\n";
      return kExitCheckFailed;
    }
    std::cerr << "twist: no inner twists at level " << N << "\n";
    return kExitNoTwist;
  }
  auto hit = find_twist_class(search_max);
  if (!hit) {
    std::cerr << "twist: no non-CM inner-twist class with new level <= " << search_max << "\n";
    return kExitNoTwist;
  }
  return run_twist_on(opt, hit->cls, hit->twist);
}

int cmd_homdim(int64_t N, int64_t Nprime) {
  json j;
  j["source"] = CompactOpen::gamma0(N).key();
  j["target"] = CompactOpen::gamma0(Nprime).key();
  j["predicted"] = predicted_hom_dim(CompactOpen::gamma0(N), CompactOpen::gamma0(Nprime));
  std::cout << j.dump(1) << "\n";
  return kExitOk;
}

int cmd_basefield(int64_t N, int64_t det_modulus, const std::vector<int64_t>& det_gens) {
  CompactOpen K = det_modulus <= 1
                      ? CompactOpen::gamma0(N)
                      : CompactOpen::det_restricted(LevelGroup::gamma0(N), det_modulus, det_gens);
  BaseField f = base_field(K);
  std::cout << base_field_to_json(f, K).dump(1) << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "heckespan: spans of Hecke double-coset operators on the homology of modular curves.\n"
      "Computes modular symbol spaces, newform decompositions, Hom-space dimension\n"
      "identities, Galois gradings, the X_0(32)/Q(i) example, and twisting operators."};
  app.require_subcommand(1);
  app.fallthrough();  // global flags may follow the subcommand

  GlobalOptions opt;
  if (const char* env = std::getenv("HECKESPAN_CACHE_DIR")) opt.cache_dir = env;
  app.add_option("--cache-dir", opt.cache_dir, "Result cache directory (env HECKESPAN_CACHE_DIR)");
  app.add_option("--det-bounds", opt.det_bounds,
                 "Increasing determinant bound schedule for span saturation")
      ->delimiter(',');
  app.add_option("--prime-bound", opt.prime_bound, "Prime bound for commutation checks");
  app.add_option("--emit", opt.emit, "Report format: json or csv")
      ->check(CLI::IsMember({"json", "csv"}));
  app.add_option("--threads", opt.threads, "Worker threads (0 = hardware)");

  int64_t N = 0, Nprime = 0, max_level = 50, search_max = 100;
  std::vector<int64_t> h_gens, det_gens;
  int64_t det_modulus = 1;
  int64_t twist_level = 0;

  auto* dec = app.add_subcommand("decompose", "Isotypic classes of the cuspidal space at a level");
  dec->add_option("N", N, "Level")->required()->check(CLI::PositiveNumber);
  dec->add_option("--h-gens", h_gens, "Generators of H for a Gamma_H level")->delimiter(',');

  auto* v1 = app.add_subcommand("verify-thm1", "Span dimension vs predicted Hom dimension");
  v1->add_option("N", N, "Source level")->required()->check(CLI::PositiveNumber);
  v1->add_option("Nprime", Nprime, "Target level")->required()->check(CLI::PositiveNumber);

  auto* vr = app.add_subcommand("verify-range", "All ordered pairs up to a bound, CSV output");
  vr->add_option("--max", max_level, "Largest level")->check(CLI::PositiveNumber);

  auto* cm = app.add_subcommand("cm32", "The complex multiplication example on X_0(32)");
  (void)cm;

  auto* tw = app.add_subcommand("twist", "Twisting operator construction and verification");
  tw->add_option("N", twist_level, "New level of the class (omit to search)");
  tw->add_option("--search-max", search_max, "Largest new level for the search");

  auto* hd = app.add_subcommand("homdim", "Predicted Hom dimension for a pair of levels");
  hd->add_option("N", N, "Source level")->required()->check(CLI::PositiveNumber);
  hd->add_option("Nprime", Nprime, "Target level")->required()->check(CLI::PositiveNumber);

  auto* bf = app.add_subcommand("basefield", "Base field of a determinant-restricted level");
  bf->add_option("N", N, "Level")->required()->check(CLI::PositiveNumber);
  bf->add_option("--det-modulus", det_modulus, "Determinant restriction modulus c");
  bf->add_option("--det-subgroup", det_gens, "Generators of D inside (Z/c)^*")->delimiter(',');

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kExitOk : kExitBadArgs;
  }

  try {
    if (dec->parsed()) return cmd_decompose(opt, N, h_gens);
    if (v1->parsed()) return cmd_verify_thm1(opt, N, Nprime);
    if (vr->parsed()) return cmd_verify_range(opt, max_level);
    if (cm->parsed()) return cmd_cm32(opt);
    if (tw->parsed()) return cmd_twist(opt, twist_level, search_max);
    if (hd->parsed()) return cmd_homdim(N, Nprime);
    if (bf->parsed()) return cmd_basefield(N, det_modulus, det_gens);
  } catch (const checksum_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitChecksum;
  } catch (const overshoot_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitCheckFailed;
  } catch (const cm_class_error& e) {
    std::cerr << "twist: refused: " << e.what() << "\n";
    return kExitCheckFailed;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitBadArgs;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kExitCheckFailed;
  }
  return kExitBadArgs;
}
