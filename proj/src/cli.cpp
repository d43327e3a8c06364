#include "mgc/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "mgc/errors.hpp"
#include "mgc/evaluation.hpp"
#include "mgc/formats.hpp"
#include "mgc/synthetic.hpp"

namespace mgc {

namespace {

struct SplitFlags {
  SplitOptions options;

  void add_to(CLI::App& cmd) {
    cmd.add_option("--train-hours", options.train_hours, "Length of the training window")
        ->capture_default_str();
    cmd.add_option("--test-hours", options.test_hours, "Length of the test window")
        ->capture_default_str();
    cmd.add_option("--min-campaign-count", options.min_campaign_count,
                   "Drop campaigns with fewer messages than this")
        ->capture_default_str();
  }
};

struct ChainFlags {
  double alpha_address = 1.0;
  double alpha_campaign = 1.0;
  ChainConfig chain;

  void add_to(CLI::App& cmd, bool with_alphas) {
    if (with_alphas) {
      cmd.add_option("--alpha-address", alpha_address, "CRP concentration for address cliques")
          ->capture_default_str();
      cmd.add_option("--alpha-campaign", alpha_campaign, "CRP concentration for campaign cliques")
          ->capture_default_str();
    }
    cmd.add_option("--burn-in", chain.burn_in_sweeps, "Sweeps discarded before sampling")
        ->capture_default_str();
    cmd.add_option("--thinning", chain.thinning, "Keep every k-th sweep")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    cmd.add_option("--samples", chain.kept_samples, "Number of kept samples")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    cmd.add_option("--seed", chain.seed, "Random seed")->capture_default_str();
  }
};

void write_output(const std::string& path, const std::string& contents, std::ostream& out) {
  if (path == "-") {
    out << contents;
  } else {
    write_text_file(path, contents);
  }
}

std::string fixed6(double v) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(6) << v;
  return s.str();
}

std::vector<std::string> read_address_list(const std::string& path) {
  std::istringstream in(read_text_file(path));
  std::vector<std::string> out;
  std::string line;
  while (std::getline(in, line)) {
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    const auto last = line.find_last_not_of(" \t\r");
    out.push_back(line.substr(first, last - first + 1));
  }
  return out;
}

std::pair<double, double> parse_grid_point(const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) throw CLI::ValidationError("--grid", "expected ALPHA_A:ALPHA_S, got " + text);
  try {
    std::size_t used_a = 0;
    std::size_t used_s = 0;
    const std::string a = text.substr(0, colon);
    const std::string s = text.substr(colon + 1);
    const double aa = std::stod(a, &used_a);
    const double as = std::stod(s, &used_s);
    if (used_a != a.size() || used_s != s.size()) throw std::invalid_argument(text);
    return {aa, as};
  } catch (const std::logic_error&) {
    throw CLI::ValidationError("--grid", "expected ALPHA_A:ALPHA_S, got " + text);
  }
}

}  // namespace

int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Botnet inference from spam evidence graphs via minimal graph clustering"};
  app.name("mgc");
  app.set_config("--config", "", "Read options from a TOML/INI file");
  app.require_subcommand(1);

  // generate ---------------------------------------------------------------
  WorldConfig world;
  std::string gen_out;
  std::string gen_truth;
  auto* generate = app.add_subcommand("generate", "Simulate a labeled botnet message trace");
  generate->add_option("--botnets", world.num_botnets)->capture_default_str();
  generate->add_option("--addresses-per-botnet", world.addresses_per_botnet)->capture_default_str();
  generate->add_option("--campaigns-per-botnet", world.campaigns_per_botnet)->capture_default_str();
  generate->add_option("--campaign-sharing", world.campaign_sharing)->capture_default_str();
  generate->add_option("--reassignment-rate", world.address_reassignment_rate,
                       "Expected reassignments per address per day")
      ->capture_default_str();
  generate->add_option("--messages-per-hour", world.messages_per_hour, "Per botnet")
      ->capture_default_str();
  generate->add_option("--duration-hours", world.duration_hours)->capture_default_str();
  generate->add_option("--observation-fraction", world.observation_fraction)->capture_default_str();
  generate->add_option("--seed", world.seed)->capture_default_str();
  generate->add_option("--out", gen_out, "Message file ('-' for stdout)")->required();
  generate->add_option("--truth", gen_truth, "Sidecar file with the generating botnet per message");

  // fit --------------------------------------------------------------------
  SplitFlags fit_split;
  ChainFlags fit_chain;
  std::string fit_messages;
  std::string fit_out;
  std::string fit_method = "mgc";
  PipelineConfig fit_pipeline;
  auto* fit = app.add_subcommand("fit", "Cluster the training window and write chain samples");
  fit->add_option("--messages", fit_messages)->required()->check(CLI::ExistingFile);
  fit->add_option("--out", fit_out, "Chain file ('-' for stdout)")->required();
  fit->add_option("--method", fit_method)
      ->capture_default_str()
      ->check(CLI::IsMember({"mgc", "threshold", "generative"}));
  fit->add_option("--threshold", fit_pipeline.threshold, "Overlap threshold (threshold method)")
      ->capture_default_str();
  fit->add_option("--generative-alpha", fit_pipeline.generative.alpha,
                  "CRP concentration (generative method)")
      ->capture_default_str();
  fit->add_option("--generative-iterations", fit_pipeline.generative_options.iterations)
      ->capture_default_str();
  fit_chain.add_to(*fit, true);
  fit_split.add_to(*fit);

  // predict ----------------------------------------------------------------
  std::string pred_messages;
  std::string pred_chain;
  std::string pred_out;
  std::string pred_addresses;
  double pred_smoothing = 0.0;
  auto* predict = app.add_subcommand("predict", "Campaign distributions per address");
  predict->add_option("--messages", pred_messages)->required()->check(CLI::ExistingFile);
  predict->add_option("--chain", pred_chain)->required()->check(CLI::ExistingFile);
  predict->add_option("--out", pred_out, "Prediction file ('-' for stdout)")->required();
  predict->add_option("--addresses", pred_addresses,
                      "File with one address per line (default: all training addresses)")
      ->check(CLI::ExistingFile);
  predict->add_option("--smoothing", pred_smoothing)->capture_default_str()->check(CLI::NonNegativeNumber);

  // evaluate ---------------------------------------------------------------
  SplitFlags eval_split;
  std::string eval_predictions;
  std::string eval_messages;
  std::string eval_roc;
  auto* evaluate = app.add_subcommand("evaluate", "ROC curve and AUC of predictions on the test window");
  evaluate->add_option("--predictions", eval_predictions)->required()->check(CLI::ExistingFile);
  evaluate->add_option("--messages", eval_messages)->required()->check(CLI::ExistingFile);
  evaluate->add_option("--out-roc", eval_roc, "ROC points file ('-' for stdout)");
  eval_split.add_to(*evaluate);

  // tune -------------------------------------------------------------------
  SplitFlags tune_split;
  ChainFlags tune_chain;
  std::string tune_messages;
  std::vector<std::string> tune_grid;
  double tune_smoothing = 0.0;
  auto* tune = app.add_subcommand("tune", "Choose concentration parameters by validation AUC");
  tune->add_option("--messages", tune_messages)->required()->check(CLI::ExistingFile);
  tune->add_option("--grid", tune_grid, "Grid points ALPHA_A:ALPHA_S (repeatable)")->required();
  tune->add_option("--smoothing", tune_smoothing)->capture_default_str()->check(CLI::NonNegativeNumber);
  tune_chain.add_to(*tune, false);
  tune_split.add_to(*tune);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << app.help();
      return 0;
    }
    err << "mgc: " << e.what() << "\n" << "Run 'mgc --help' for usage.\n";
    return 2;
  }

  try {
    if (*generate) {
      const auto trace = generate_trace(world);
      std::ostringstream messages;
      write_messages(messages, trace.messages);
      write_output(gen_out, messages.str(), out);
      if (!gen_truth.empty()) {
        std::ostringstream truth;
        write_truth(truth, trace);
        write_output(gen_truth, truth.str(), out);
      }
      if (gen_out != "-") err << "generated " << trace.messages.size() << " messages\n";
    } else if (*fit) {
      const auto messages = read_messages_file(fit_messages);
      const auto split = split_train_test(messages, fit_split.options);
      fit_pipeline.method = parse_method(fit_method);
      fit_pipeline.alpha_address = fit_chain.alpha_address;
      fit_pipeline.alpha_campaign = fit_chain.alpha_campaign;
      fit_pipeline.chain = fit_chain.chain;
      fit_pipeline.generative_options.seed = fit_chain.chain.seed;
      ChainFile chain;
      chain.method = fit_method;
      chain.nodes = split.train_origin;
      chain.samples = fit_clusterings(split.train, fit_pipeline);
      std::ostringstream text;
      write_chain(text, chain);
      write_output(fit_out, text.str(), out);
    } else if (*predict) {
      const auto messages = read_messages_file(pred_messages);
      std::istringstream chain_text(read_text_file(pred_chain));
      const auto chain = read_chain(chain_text);

      std::map<NodeId, const MessageRecord*> by_id;
      for (const auto& m : messages) by_id[m.node_id] = &m;
      std::vector<MessageRecord> train;
      train.reserve(chain.nodes.size());
      for (NodeId id : chain.nodes) {
        auto it = by_id.find(id);
        if (it == by_id.end()) {
          throw DataError("chain refers to node " + std::to_string(id) + " absent from the messages");
        }
        train.push_back(*it->second);
      }
      train = renumbered(train);

      PredictionTable table;
      if (pred_addresses.empty()) {
        table = predict_all(chain.samples, train, pred_smoothing);
      } else {
        const PosteriorPredictor predictor(chain.samples, train, pred_smoothing);
        for (const auto& a : read_address_list(pred_addresses)) table[a] = predictor.predict(a);
      }
      std::ostringstream text;
      write_predictions(text, table);
      write_output(pred_out, text.str(), out);
    } else if (*evaluate) {
      const auto messages = read_messages_file(eval_messages);
      std::istringstream pred_text(read_text_file(eval_predictions));
      const auto predictions = read_predictions(pred_text);
      const auto split = split_train_test(messages, eval_split.options);
      const auto roc = evaluate_predictions(split, predictions);
      if (!eval_roc.empty()) {
        std::ostringstream text;
        write_roc(text, roc);
        write_output(eval_roc, text.str(), out);
      }
      out << "auc=" << fixed6(roc.auc) << " positives=" << roc.positives
          << " negatives=" << roc.negatives << '\n';
    } else if (*tune) {
      std::vector<std::pair<double, double>> grid;
      for (const auto& g : tune_grid) grid.push_back(parse_grid_point(g));
      const auto messages = read_messages_file(tune_messages);
      const auto split = split_train_test(messages, tune_split.options);
      const auto choice = tune_alphas(split.train, split.test, grid, tune_chain.chain, tune_smoothing);
      for (std::size_t k = 0; k < grid.size(); ++k) {
        out << "grid alpha_address=" << format_double(grid[k].first)
            << " alpha_campaign=" << format_double(grid[k].second) << " auc=" << fixed6(choice.aucs[k])
            << '\n';
      }
      out << "best alpha_address=" << format_double(choice.alpha_address)
          << " alpha_campaign=" << format_double(choice.alpha_campaign) << " auc=" << fixed6(choice.auc)
          << '\n';
    }
  } catch (const CLI::ParseError& e) {
    err << "mgc: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "mgc: error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

}  // namespace mgc
