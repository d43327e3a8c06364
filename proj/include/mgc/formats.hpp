#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "mgc/evaluation.hpp"
#include "mgc/evidence_graph.hpp"
#include "mgc/gibbs_sampler.hpp"
#include "mgc/synthetic.hpp"

// Line-oriented text formats. Records are whitespace-separated key=value
// tokens; blank lines and lines starting with '#' are ignored. Identifiers
// may not contain whitespace or '='. See docs/formats.md.

namespace mgc {

std::vector<MessageRecord> read_messages(std::istream& in);
void write_messages(std::ostream& out, std::span<const MessageRecord> messages);

/// node_id=<id> botnet=<id>, one line per message.
void write_truth(std::ostream& out, const LabeledTrace& trace);
std::vector<std::size_t> read_truth(std::istream& in);

struct ChainFile {
  std::string method = "mgc";
  std::vector<NodeId> nodes;  // input node id of each position in a clustering
  std::vector<ChainSample> samples;
};

void write_chain(std::ostream& out, const ChainFile& chain);
ChainFile read_chain(std::istream& in);

/// One record per (address, campaign) with positive probability, addresses
/// ascending, then probability descending, then campaign ascending.
void write_predictions(std::ostream& out, const PredictionTable& predictions);
PredictionTable read_predictions(std::istream& in);

/// Header "fpr,tpr,threshold" then one record per ROC point.
void write_roc(std::ostream& out, const RocCurve& roc);

/// Shortest decimal text that parses back to the same double.
std::string format_double(double value);

std::vector<MessageRecord> read_messages_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& contents);
std::string read_text_file(const std::filesystem::path& path);

}  // namespace mgc
