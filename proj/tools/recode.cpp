#include <iostream>
#include <iterator>
#include <map>
#include <string>

#include <CLI11.hpp>

#include "recode/analytics.hpp"
#include "recode/classifier.hpp"
#include "recode/codes.hpp"
#include "recode/engine.hpp"
#include "recode/evaluation.hpp"
#include "recode/replay.hpp"
#include "recode/scripts.hpp"
#include "recode/service.hpp"
#include "recode/settings.hpp"
#include "recode/storage.hpp"

using namespace recode;

namespace {

// Options that map onto settings keys. Only options given on the command
// line end up in the flag layer.
struct FlagLayer {
  std::map<std::string, std::string> values;
  std::vector<std::pair<std::string, CLI::Option*>> options;
  std::map<std::string, std::string> storage;

  void add(CLI::App& app, const std::string& name, const std::string& key, const std::string& help) {
    options.emplace_back(key, app.add_option(name, storage[key], help));
  }
  std::map<std::string, std::string> collect() {
    for (auto& [key, opt] : options) {
      if (opt->count() > 0) values[key] = storage[key];
    }
    return values;
  }
};

std::string read_input(const std::string& source) {
  if (source == "-") {
    return std::string(std::istreambuf_iterator<char>(std::cin), std::istreambuf_iterator<char>());
  }
  return read_file(source);
}

Provider provider_of(const Settings& s) {
  auto p = parse_provider(s.get("provider"));
  if (!p) throw Error(ErrorKind::ConfigError, "unknown provider '" + s.get("provider") + "'");
  return *p;
}

void print_scores(const ClassificationResult& r) {
  std::cout << "context: " << context_id(r.context) << "\n";
  std::cout << "method: " << to_string(r.method) << "\n";
  std::cout << "scores:";
  for (auto c : kAllContexts) std::cout << ' ' << context_id(c) << '=' << r.scores[index_of(c)];
  std::cout << "\n";
}

int cmd_codes(bool document) {
  if (document) {
    std::cout << render_framework_document();
    return 0;
  }
  for (const auto& code : all_codes()) {
    std::cout << context_id(code.context()) << "  " << code.canonical() << "  " << code.context_label()
              << "\n    personality: " << code.trait().name << " (";
    bool first = true;
    for (auto d : code.trait().descriptors) {
      std::cout << (first ? "" : ", ") << d;
      first = false;
    }
    std::cout << ")\n    tone: " << code.tone().name << "\n";
    for (std::size_t i = 0; i < code.recovery().steps.size(); ++i) {
      std::cout << "    " << i + 1 << ". " << code.recovery().steps[i] << "\n";
    }
  }
  return 0;
}

int cmd_classify(const Settings& s, const std::string& input, bool delegated) {
  const auto text = read_input(input);
  const auto lexicon = s.get("lexicon").empty() ? Lexicon::builtin() : Lexicon::load(s.get("lexicon"));
  if (!delegated) {
    print_scores(classify(text, lexicon));
    return 0;
  }
  auto binding = fresh_agent(s.gateway(provider_of(s)));
  try {
    print_scores(classify_delegated(text, *binding, lexicon));
  } catch (const DelegationError& e) {
    if (!e.fallback()) throw;
    std::cerr << "delegated classification failed (" << e.message() << "); using lexicon result\n";
    print_scores(*e.fallback());
  }
  return 0;
}

int cmd_run(const Settings& s, const std::string& condition_id, const std::string& context_id_text,
            const std::string& script_path, bool print) {
  const auto condition = *parse_condition(condition_id);
  const auto context = *parse_context(context_id_text);
  const auto provider = provider_of(s);
  std::optional<Script> script;
  if (!script_path.empty()) script = load_script(script_path);
  const auto transcript =
      run_script(condition, context, s.gateway(provider), s.engine(), script ? &*script : nullptr);
  Store store(s.get("data_dir"));
  const auto dir = store.save_transcript(transcript, to_string(provider), s.snapshot());
  if (print) std::cout << to_plain_text(transcript);
  std::cout << transcript.code << " " << dir.string() << "\n";
  return 0;
}

int cmd_evaluate(const Settings& s, const std::string& code) {
  Store store(s.get("data_dir"));
  const auto transcript = store.load_transcript(code);
  const auto record = evaluate_transcript(transcript, s.gateway(provider_of(s)));
  const auto path = store.save_scores(record);
  std::cout << record.score.transcript_code << " " << record.score.raw_total << "/" << kMaxTotal << " "
            << format(transcript_percent(record.score)) << "% " << path.string() << "\n";
  return 0;
}

int cmd_report(const Settings& s) {
  Store store(s.get("data_dir"));
  std::vector<RubricScore> scores;
  for (const auto& r : store.latest_scores()) scores.push_back(r.score);
  if (scores.empty()) throw Error(ErrorKind::NotFound, "no stored scores under " + s.get("data_dir"));
  const auto report = build_report(scores);
  const auto text = render_report(report);
  store.save_report(text, report_to_csv(report));
  std::cout << text;
  return 0;
}

int cmd_replay(const Settings& s, bool persist) {
  Store store(s.get("data_dir"));
  const auto result = replay_paper(s.gateway(Provider::Mock), persist ? &store : nullptr);
  for (const auto& check : result.checks) {
    if (!check.ok()) {
      std::cerr << "mismatch " << check.metric << ": expected " << check.expected << ", got "
                << check.actual << "\n";
    }
  }
  std::cerr << "replay: " << result.checks.size() - result.failures() << "/" << result.checks.size()
            << " reference values match\n";
  std::cout << render_report(result.report);
  return result.ok() ? 0 : 1;
}

int cmd_serve(const Settings& s) {
  const auto host = s.get("host");
  if (host != "127.0.0.1" && host != "localhost" && host != "::1" && s.source("host") != "flag") {
    throw Error(ErrorKind::ConfigError, "non-loopback address " + host + " needs an explicit --host");
  }
  ServiceConfig config;
  config.data_dir = s.get("data_dir");
  config.mock = s.gateway(Provider::Mock);
  config.http = s.gateway(Provider::Http);
  config.engine = s.engine();
  Service service(config);
  const int port = service.bind(s.get("host"), std::stoi(s.get("port")));
  if (port < 0) {
    std::cerr << "cannot bind " << s.get("host") << ":" << s.get("port") << "\n";
    return exit_code(ErrorKind::ConfigError);
  }
  std::cout << "listening on http://" << s.get("host") << ":" << port << std::endl;
  service.run();
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Recovery-code experiment toolkit"};
  app.require_subcommand(1);
  FlagLayer flags;
  std::string config_path;
  app.add_option("--config", config_path, "flat key = value settings file")
      ->envname("RECODE_CONFIG");
  flags.add(app, "--data-dir", "data_dir", "storage root");
  flags.add(app, "--fixtures", "fixtures", "fixture pack root for the mock provider");

  const std::vector<std::string> contexts = {"C1", "C2", "C3", "C4"};

  auto* codes = app.add_subcommand("codes", "list the four recovery codes");
  bool document = false;
  codes->add_flag("--document", document, "print the framework document sent in training");

  auto* classify_cmd = app.add_subcommand("classify", "classify a task prompt into a context");
  std::string input = "-";
  bool delegated = false;
  classify_cmd->add_option("input", input, "prompt file, or - for stdin");
  classify_cmd->add_flag("--delegated", delegated, "ask the model, falling back to the lexicon");
  flags.add(*classify_cmd, "--provider", "provider", "mock or http");
  flags.add(*classify_cmd, "--lexicon", "lexicon", "keyword table");

  auto* run = app.add_subcommand("run", "run one scripted session and store the transcript");
  std::string condition, context, script_path;
  bool print = false;
  run->add_option("--condition", condition, "A or B")->required()->check(CLI::IsMember({"A", "B"}));
  run->add_option("--context", context, "C1..C4")->required()->check(CLI::IsMember(contexts));
  run->add_option("--script", script_path, "user-turn script file")->check(CLI::ExistingFile);
  run->add_flag("--print", print, "print the transcript");
  flags.add(*run, "--provider", "provider", "mock or http");

  auto* evaluate = app.add_subcommand("evaluate", "score the latest transcript for a code");
  std::string code;
  evaluate->add_option("code", code, "transcript code, e.g. CB:C3")->required();
  flags.add(*evaluate, "--provider", "provider", "mock or http");

  app.add_subcommand("report", "aggregate the latest scores");

  auto* replay = app.add_subcommand("replay-paper", "replay the reference experiment offline");
  bool no_store = false;
  replay->add_flag("--no-store", no_store, "do not write runs or reports");

  auto* serve = app.add_subcommand("serve", "start the local HTTP service");
  flags.add(*serve, "--host", "host", "bind address");
  flags.add(*serve, "--port", "port", "port, 0 for any free port");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  }
  for (auto& [key, opt] : flags.options) {
    if (key == "provider" && opt->count() > 0 && !parse_provider(flags.storage[key])) {
      std::cerr << "usage error: --provider: " << flags.storage[key] << " not in {mock,http}\n";
      return 2;
    }
  }

  try {
    const auto settings = Settings::resolve(flags.collect(), config_path);
    if (codes->parsed()) return cmd_codes(document);
    if (classify_cmd->parsed()) return cmd_classify(settings, input, delegated);
    if (run->parsed()) return cmd_run(settings, condition, context, script_path, print);
    if (evaluate->parsed()) return cmd_evaluate(settings, code);
    if (replay->parsed()) return cmd_replay(settings, !no_store);
    if (serve->parsed()) return cmd_serve(settings);
    return cmd_report(settings);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code(ErrorKind::ConfigError);
  }
}
