#include "cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <optional>

#include "qtheta/error.hpp"
#include "qtheta/json_io.hpp"

namespace qtheta::cli {

namespace {

struct Options {
  int m = 1;
  std::string out_path;
  int jobs = 1;
  int window = 4;
  int64_t order = 16;
  bool window_set = false, order_set = false;
  bool corrupt = false;
  std::string target, file1, file2;
};

bool usage_error(ErrorCode c) {
  return c == ErrorCode::ParseError || c == ErrorCode::UnknownName || c == ErrorCode::UnresolvedReference;
}

Json error_json(const Error& e) {
  Json j;
  j["schema"] = 1;
  j["status"] = "fail";
  j["error"] = to_string(e.code());
  j["message"] = e.what();
  return j;
}

class Runner {
 public:
  Runner(const Options& o, std::ostream& out, std::ostream& err) : o_(o), out_(out), err_(err) {}

  int emit(const Json& j, int code) {
    std::string text = j.dump(2) + "\n";
    if (o_.out_path.empty()) {
      out_ << text;
    } else {
      std::ofstream f(o_.out_path);
      if (!f) {
        err_ << "cannot write " << o_.out_path << "\n";
        return 2;
      }
      f << text;
    }
    return code;
  }

  const CycloField& field() const { return CycloField::get(o_.m); }

  int verify() {
    std::vector<EquationSpec> specs;
    std::string id = o_.target;
    if (std::filesystem::exists(o_.target)) {
      EquationSpec s = spec_from_json(read_json_file(o_.target), field());
      id = s.label;
      specs.push_back(std::move(s));
    } else {
      specs = named_equations(o_.target);
    }
    if (o_.corrupt) corrupt(specs);
    VerifyReport r = verify_all(id, std::move(specs), o_.window_set ? std::optional<int>(o_.window) : std::nullopt,
                                o_.order_set ? std::optional<int64_t>(o_.order) : std::nullopt, o_.jobs);
    return emit(report_json(r), r.pass ? 0 : 1);
  }

  Multiplier load_multiplier(const std::string& path) { return multiplier_from_json(read_json_file(path), field()); }

  Json basis_json(const ThetaBasis& b) {
    Json arr = Json::array();
    for (const auto& th : b.basis)
      arr.push_back(to_json(evaluate(th, o_.window, 2 * o_.order, o_.jobs), b.multiplier.param().rank()));
    return arr;
  }

  int theta() {
    Multiplier L = load_multiplier(o_.file1);
    ThetaBasis b = theta_dim_basis(L);
    Json j;
    j["schema"] = 1;
    j["dim"] = b.dim;
    j["index"] = b.index;
    j["ample"] = is_ample(L);
    j["symmetric"] = is_symmetric(L);
    j["cosets"] = b.cosets;
    bool ok = true;
    Json checks = Json::array();
    for (const auto& th : b.basis) {
      MembershipReport r = check_theta(L, th, o_.window, 2 * o_.order, o_.jobs);
      ok = ok && r.ok;
      checks.push_back(r.ok);
    }
    j["membership"] = checks;
    j["basis"] = basis_json(b);
    j["status"] = ok ? "pass" : "fail";
    return emit(j, ok ? 0 : 1);
  }

  int compose_cmd() {
    Multiplier outer = load_multiplier(o_.file1);
    Multiplier inner = load_multiplier(o_.file2);
    Json j;
    j["schema"] = 1;
    if (!composable(outer, inner)) {
      j["status"] = "fail";
      j["composable"] = false;
      return emit(j, 1);
    }
    Multiplier c = compose(outer, inner);
    j["status"] = "pass";
    j["composable"] = true;
    j["ample"] = is_ample(c);
    j["symmetric"] = is_symmetric(c);
    j["multiplier"] = to_json(c);
    return emit(j, 0);
  }

  int small_group() {
    Multiplier L = load_multiplier(o_.file1);
    SmallHeisStructure s = group_structure(L);
    ThetaBasis b = theta_dim_basis(L);
    Json j;
    j["schema"] = 1;
    j["status"] = "pass";
    j["dim"] = b.dim;
    j.update(structure_report(s));
    Json mats = Json::array();
    const int d = L.param().rank();
    for (const auto& k : s.kernel_gens)
      mats.push_back(to_json(act_on_theta({UnitMonomial(), k, Vec(d, 0)}, b, o_.window, 2 * o_.order, o_.jobs)));
    j["kernel_actions"] = mats;
    Json lifts = Json::array();
    for (int i = 0; i < d; ++i) {
      Vec e(d, 0);
      e[i] = 1;
      auto ls = gamma_lift(L, e);
      if (ls.empty()) continue;
      Json l;
      l["gamma"] = e;
      l["xi"] = to_json(ls.front().xi);
      l["action"] = to_json(act_on_theta(ls.front(), b, o_.window, 2 * o_.order, o_.jobs));
      lifts.push_back(l);
    }
    j["lift_actions"] = lifts;
    return emit(j, 0);
  }

  int act() {
    Multiplier L = load_multiplier(o_.file2);
    HeisElement a = element_from_json(read_json_file(o_.file1), L.param());
    SmallHeisElement g{a.c_l(), a.x_l(), a.h_l()};
    ThetaBasis b = theta_dim_basis(L);
    Json j;
    j["schema"] = 1;
    j["element"] = to_json(a);
    j["dim"] = b.dim;
    j["cosets"] = b.cosets;
    j["matrix"] = to_json(act_on_theta(g, b, o_.window, 2 * o_.order, o_.jobs));
    j["status"] = "pass";
    return emit(j, 0);
  }

 private:
  const Options& o_;
  std::ostream& out_;
  std::ostream& err_;
};

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Exact quantum-torus theta engine"};
  app.name("qtheta");
  app.require_subcommand(1);
  app.add_option("--cyclotomic-order", o.m, "work over Q(zeta_m)")->check(CLI::PositiveNumber);
  app.add_option("--out", o.out_path, "write the JSON report here instead of stdout");
  app.add_option("--jobs", o.jobs, "worker threads for window cells")->check(CLI::PositiveNumber);

  auto window_opts = [&](CLI::App* sub) {
    sub->add_option("--window", o.window, "check |h|_inf <= R")->check(CLI::NonNegativeNumber);
    sub->add_option("--order", o.order, "truncation order in powers of q")->check(CLI::NonNegativeNumber);
  };
  CLI::App* verify = app.add_subcommand("verify", "verify a registered identity or an equation spec file");
  verify->add_option("identity", o.target, "identity id or spec.json")->required();
  window_opts(verify);
  verify->add_flag("--corrupt", o.corrupt, "multiply the first coefficient by q (negative self-test)");

  CLI::App* theta = app.add_subcommand("theta", "theta dimension and basis of a multiplier");
  theta->add_option("multiplier", o.file1)->required()->check(CLI::ExistingFile);
  window_opts(theta);

  CLI::App* comp = app.add_subcommand("compose", "compose two multipliers (outer after inner)");
  comp->add_option("outer", o.file1)->required()->check(CLI::ExistingFile);
  comp->add_option("inner", o.file2)->required()->check(CLI::ExistingFile);

  CLI::App* small = app.add_subcommand("small-group", "structure of the small Heisenberg group");
  small->add_option("multiplier", o.file1)->required()->check(CLI::ExistingFile);
  window_opts(small);

  CLI::App* act = app.add_subcommand("act", "matrix of an element on the theta basis");
  act->add_option("element", o.file1)->required()->check(CLI::ExistingFile);
  act->add_option("multiplier", o.file2)->required()->check(CLI::ExistingFile);
  window_opts(act);

  for (auto* sub : app.get_subcommands({})) sub->fallthrough();

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "qtheta: " << e.what() << "\n" << "run 'qtheta --help' for usage\n";
    return 2;
  }
  CLI::App* used = app.get_subcommands().front();
  o.window_set = used->get_option_no_throw("--window") && used->count("--window") > 0;
  o.order_set = used->get_option_no_throw("--order") && used->count("--order") > 0;

  Runner r(o, out, err);
  try {
    if (verify->parsed()) return r.verify();
    if (theta->parsed()) return r.theta();
    if (comp->parsed()) return r.compose_cmd();
    if (small->parsed()) return r.small_group();
    if (act->parsed()) return r.act();
  } catch (const Error& e) {
    if (usage_error(e.code())) {
      err << "qtheta: " << e.what() << "\n";
      return 2;
    }
    return r.emit(error_json(e), 1);
  } catch (const nlohmann::json::exception& e) {
    err << "qtheta: malformed JSON: " << e.what() << "\n";
    return 2;
  }
  return 2;
}

}  // namespace qtheta::cli
