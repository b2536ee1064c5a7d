#include "thumbside/cli.hpp"

#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "thumbside/bridge_server.hpp"
#include "thumbside/bridge_session.hpp"
#include "thumbside/synth_bench.hpp"

namespace thumbside::cli {

using nlohmann::json;

namespace {

struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string slurp(const std::string& path, std::istream& in) {
  if (path == "-") {
    return {std::istreambuf_iterator<char>(in), {}};
  }
  std::ifstream file(path, std::ios::binary);
  if (!file) throw InputError("cannot open " + path);
  return {std::istreambuf_iterator<char>(file), {}};
}

// Accepts a raw [[x, y, t], ...] array or a single corpus record.
SwipeTrace load_trace(const std::string& path, std::istream& in) {
  const std::string text = slurp(path, in);
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded()) throw InputError(path + ": not a JSON document or single JSONL record");
  if (j.is_array()) j = json{{"schema", 1}, {"id", path}, {"samples", std::move(j)}};
  if (!j.is_object()) throw InputError(path + ": expected a sample array or a record");
  try {
    return record_from_json(j).trace;
  } catch (const BenchError& e) {
    throw InputError(path + ": " + e.what());
  }
}

ClassifierConfig classifier_from(double epsilon_c, double q_min) {
  ClassifierConfig c;
  c.epsilon_c = epsilon_c;
  c.q_min = q_min;
  if (!(epsilon_c >= 0.0) || !(q_min >= 0.0 && q_min <= 1.0)) {
    throw InputError("--epsilon-c must be >= 0 and --q-min in [0, 1]");
  }
  return c;
}

struct FitArgs {
  std::string file = "-";
  double epsilon_c = ClassifierConfig{}.epsilon_c;
  double q_min = ClassifierConfig{}.q_min;
};

int cmd_fit(const FitArgs& a, std::istream& in, std::ostream& out, std::ostream& err) {
  const auto cls = classifier_from(a.epsilon_c, a.q_min);
  const SwipeTrace trace = load_trace(a.file, in);

  if (auto reason = validate_trace(trace)) {
    out << json{{"rejected", to_string(*reason)}, {"n", trace.size()}}.dump() << '\n';
    err << "thumbside: rejected: " << to_string(*reason) << '\n';
    return kRejected;
  }
  const auto fit = fit_quadratic(trace);
  const auto d = classify_fit(fit, cls);
  out << json{{"a", fit.a},
              {"b", fit.b},
              {"c", fit.c},
              {"r2", fit.r2},
              {"n", fit.n},
              {"ss_res", fit.ss_res},
              {"decision", to_string(d.label)},
              {"curvature_margin", d.curvature_margin}}
             .dump()
      << '\n';
  return kOk;
}

struct ClassifyArgs {
  bool stream = false;
  double epsilon_c = ClassifierConfig{}.epsilon_c;
  double q_min = ClassifierConfig{}.q_min;
  int flip_count = HysteresisConfig{}.flip_count;
  bool decay = false;
  bool debug = false;
};

int cmd_classify(const ClassifyArgs& a, std::istream& in, std::ostream& out,
                 std::ostream& err) {
  if (!a.stream) throw InputError("classify reads touch events; pass --stream");
  if (a.flip_count < 1) throw InputError("--flip-count must be >= 1");
  SessionOptions opts;
  opts.classifier = classifier_from(a.epsilon_c, a.q_min);
  opts.hysteresis.flip_count = a.flip_count;
  opts.hysteresis.ambiguous_policy = a.decay ? AmbiguousPolicy::Decay : AmbiguousPolicy::Hold;
  opts.debug = a.debug;
  BridgeSession session(opts);

  std::string line;
  std::size_t lineno = 0;
  int status = kOk;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    session.on_text(line);
    while (auto msg = session.outbound().pop()) {
      if (msg->find("\"type\":\"error\"") != std::string::npos) {
        err << "thumbside: line " << lineno << ": "
            << json::parse(*msg).value("message", "error") << '\n';
        status = kInputError;
      }
      out << *msg << '\n';
    }
  }
  return status;
}

struct GenerateArgs {
  std::size_t count = 0;
  std::string grip_mix = "left=0.45,right=0.45,index=0.1";
  double noise = GeneratorParams{}.noise_sigma;
  std::uint64_t seed = 0;
  std::string out = "-";
};

int cmd_generate(const GenerateArgs& a, std::ostream& out) {
  CorpusSpec spec;
  spec.count = a.count;
  spec.mix = parse_grip_mix(a.grip_mix);
  spec.base.noise_sigma = a.noise;
  spec.seed = a.seed;
  const auto records = generate_corpus(spec);
  if (a.out == "-") {
    out << write_corpus_string(records);
  } else {
    write_corpus(records, a.out);
  }
  return kOk;
}

struct EvalArgs {
  std::string corpus;
  double epsilon_c = ClassifierConfig{}.epsilon_c;
  double q_min = ClassifierConfig{}.q_min;
  bool table = false;
};

int cmd_eval(const EvalArgs& a, std::ostream& out) {
  DetectorConfig cfg;
  cfg.classifier = classifier_from(a.epsilon_c, a.q_min);
  const auto report = evaluate_corpus(a.corpus, cfg);
  if (a.table) {
    out << format_table(report);
  } else {
    out << to_json(report).dump() << '\n';
  }
  return kOk;
}

struct ServeArgs {
  std::string address = "127.0.0.1";
  int port = kDefaultBridgePort;
  std::string static_dir;
  bool debug = false;
};

int cmd_serve(const ServeArgs& a, std::ostream& out) {
  if (a.port < 0 || a.port > 65535) throw InputError("--port out of range");
  BridgeServerOptions opts;
  opts.address = a.address;
  opts.port = static_cast<std::uint16_t>(a.port);
  if (!a.static_dir.empty()) {
    if (!std::filesystem::is_directory(a.static_dir)) {
      throw InputError("--static-dir is not a directory: " + a.static_dir);
    }
    opts.static_dir = a.static_dir;
  }
  opts.session.debug = a.debug;
  BridgeServer server(opts);
  server.start();
  out << json{{"listening", a.address}, {"port", server.port()}}.dump() << std::endl;
  server.wait_for_signal();
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out,
        std::ostream& err) {
  CLI::App app{"Thumb-side detection from swipe curvature", "thumbside"};
  app.set_config("--config", "", "INI/TOML file with the same keys as the flags");
  app.allow_config_extras(CLI::config_extras_mode::error);
  app.require_subcommand(1);

  FitArgs fit;
  auto* fit_cmd = app.add_subcommand("fit", "Fit one trace and print the decision");
  fit_cmd->add_option("file", fit.file, "Sample array or single record ('-' for stdin)");
  fit_cmd->add_option("--epsilon-c", fit.epsilon_c, "Curvature dead zone");
  fit_cmd->add_option("--q-min", fit.q_min, "Minimum R^2 for a side decision");

  ClassifyArgs classify;
  auto* classify_cmd =
      app.add_subcommand("classify", "Run touch-event JSONL from stdin through the detector");
  classify_cmd->add_flag("--stream", classify.stream, "Read touch/hint messages line by line");
  classify_cmd->add_option("--epsilon-c", classify.epsilon_c, "Curvature dead zone");
  classify_cmd->add_option("--q-min", classify.q_min, "Minimum R^2 for a side decision");
  classify_cmd->add_option("--flip-count", classify.flip_count,
                           "Agreeing swipes needed to change sides");
  classify_cmd->add_flag("--decay", classify.decay, "Ambiguous swipes reset the evidence run");
  classify_cmd->add_flag("--debug", classify.debug, "Emit fit_debug messages");

  GenerateArgs gen;
  auto* gen_cmd = app.add_subcommand("generate", "Write a synthetic labeled corpus");
  gen_cmd->add_option("--count", gen.count, "Number of traces")->required();
  gen_cmd->add_option("--grip-mix", gen.grip_mix, "Label proportions, e.g. left=0.5,right=0.5");
  gen_cmd->add_option("--noise", gen.noise, "Gaussian jitter sigma in px")
      ->check(CLI::NonNegativeNumber);
  gen_cmd->add_option("--seed", gen.seed, "Corpus seed");
  gen_cmd->add_option("--out", gen.out, "Output path ('-' for stdout)");

  EvalArgs ev;
  auto* eval_cmd = app.add_subcommand("eval", "Score the detector on a labeled corpus");
  eval_cmd->add_option("--corpus", ev.corpus, "Corpus JSONL path")->required();
  eval_cmd->add_option("--epsilon-c", ev.epsilon_c, "Curvature dead zone");
  eval_cmd->add_option("--q-min", ev.q_min, "Minimum R^2 for a side decision");
  auto* as_json = eval_cmd->add_flag("--json", "JSON report (default)");
  auto* as_table = eval_cmd->add_flag("--table", ev.table, "Aligned text table");
  as_json->excludes(as_table);

  ServeArgs serve;
  auto* serve_cmd = app.add_subcommand("serve", "Run the WebSocket bridge and static server");
  serve_cmd->add_option("--port", serve.port, "TCP port (0 picks a free one)");
  serve_cmd->add_option("--address", serve.address, "Listen address");
  serve_cmd->add_option("--static-dir", serve.static_dir, "Directory with the playground build");
  serve_cmd->add_flag("--debug", serve.debug, "Send fit_debug to every client");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "thumbside: " << e.what() << '\n';
    return kInputError;
  }

  try {
    if (*fit_cmd) return cmd_fit(fit, in, out, err);
    if (*classify_cmd) return cmd_classify(classify, in, out, err);
    if (*gen_cmd) return cmd_generate(gen, out);
    if (*eval_cmd) return cmd_eval(ev, out);
    if (*serve_cmd) return cmd_serve(serve, out);
  } catch (const std::exception& e) {
    err << "thumbside: " << e.what() << '\n';
    return kInputError;
  }
  return kInputError;
}

}  // namespace thumbside::cli
