#include "mgc/formats.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

#include "mgc/errors.hpp"

namespace mgc {

namespace {

class Record {
 public:
  Record(const std::string& line, std::size_t line_number) : line_number_(line_number) {
    std::istringstream tokens(line);
    std::string token;
    while (tokens >> token) {
      const auto eq = token.find('=');
      if (eq == std::string::npos || eq == 0) fail("expected key=value, got '" + token + "'");
      auto [it, inserted] = fields_.emplace(token.substr(0, eq), token.substr(eq + 1));
      if (!inserted) fail("duplicate key '" + it->first + "'");
    }
  }

  const std::string& text(const std::string& key) const {
    auto it = fields_.find(key);
    if (it == fields_.end()) fail("missing key '" + key + "'");
    if (it->second.empty()) fail("empty value for '" + key + "'");
    return it->second;
  }

  template <typename Int>
  Int integer(const std::string& key) const {
    const auto& value = text(key);
    Int out{};
    auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
    if (ec != std::errc() || ptr != value.data() + value.size()) {
      fail("'" + key + "' is not an integer: " + value);
    }
    return out;
  }

  double real(const std::string& key) const {
    const auto& value = text(key);
    double out = 0.0;
    auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
    if (ec != std::errc() || ptr != value.data() + value.size()) {
      fail("'" + key + "' is not a number: " + value);
    }
    return out;
  }

  bool has(const std::string& key) const { return fields_.contains(key); }

  void only(std::initializer_list<const char*> allowed) const {
    for (const auto& [key, value] : fields_) {
      if (std::none_of(allowed.begin(), allowed.end(), [&](const char* k) { return key == k; })) {
        fail("unexpected key '" + key + "'");
      }
    }
  }

  [[noreturn]] void fail(const std::string& what) const {
    throw DataError("line " + std::to_string(line_number_) + ": " + what);
  }

 private:
  std::size_t line_number_;
  std::map<std::string, std::string> fields_;
};

// Calls fn(record) for every non-blank, non-comment line.
template <typename Fn>
void for_each_record(std::istream& in, Fn&& fn) {
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    fn(Record(line, line_number));
  }
}

void check_identifier(const std::string& id, const char* what) {
  if (id.empty() || id.find_first_of(" \t\r\n=") != std::string::npos) {
    throw DataError(std::string(what) + " '" + id + "' is empty or contains whitespace or '='");
  }
}

template <typename T>
std::vector<T> parse_list(const Record& record, const std::string& key) {
  std::vector<T> out;
  const auto& value = record.text(key);
  std::size_t start = 0;
  while (start <= value.size()) {
    const auto comma = std::min(value.find(',', start), value.size());
    T v{};
    auto [ptr, ec] = std::from_chars(value.data() + start, value.data() + comma, v);
    if (ec != std::errc() || ptr != value.data() + comma) record.fail("malformed list in '" + key + "'");
    out.push_back(v);
    start = comma + 1;
  }
  return out;
}

template <typename Range>
std::string join(const Range& values) {
  std::string out;
  for (const auto& v : values) {
    if (!out.empty()) out += ',';
    out += std::to_string(v);
  }
  return out;
}

}  // namespace

std::string format_double(double value) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, ptr);
}

std::vector<MessageRecord> read_messages(std::istream& in) {
  std::vector<MessageRecord> out;
  for_each_record(in, [&](const Record& r) {
    r.only({"node_id", "address_id", "campaign_id", "timestamp"});
    out.push_back(MessageRecord{r.integer<NodeId>("node_id"), r.text("address_id"),
                                r.text("campaign_id"), r.integer<std::int64_t>("timestamp")});
  });
  return out;
}

void write_messages(std::ostream& out, std::span<const MessageRecord> messages) {
  for (const auto& m : messages) {
    check_identifier(m.address_id, "address_id");
    check_identifier(m.campaign_id, "campaign_id");
    out << "node_id=" << m.node_id << " address_id=" << m.address_id
        << " campaign_id=" << m.campaign_id << " timestamp=" << m.timestamp << '\n';
  }
}

void write_truth(std::ostream& out, const LabeledTrace& trace) {
  for (std::size_t i = 0; i < trace.messages.size(); ++i) {
    out << "node_id=" << trace.messages[i].node_id << " botnet=" << trace.truth_botnet[i] << '\n';
  }
}

std::vector<std::size_t> read_truth(std::istream& in) {
  std::map<NodeId, std::size_t> by_node;
  for_each_record(in, [&](const Record& r) {
    r.only({"node_id", "botnet"});
    if (!by_node.emplace(r.integer<NodeId>("node_id"), r.integer<std::size_t>("botnet")).second) {
      r.fail("duplicate node_id");
    }
  });
  std::vector<std::size_t> out;
  for (const auto& [node, botnet] : by_node) {
    if (node != out.size()) throw DataError("truth file: node ids are not contiguous");
    out.push_back(botnet);
  }
  return out;
}

void write_chain(std::ostream& out, const ChainFile& chain) {
  out << "# chain samples: cluster label per node, aligned with nodes=\n";
  out << "method=" << chain.method << '\n';
  out << "nodes=" << join(chain.nodes) << '\n';
  for (std::size_t k = 0; k < chain.samples.size(); ++k) {
    const auto& s = chain.samples[k];
    if (s.clustering.num_nodes() != chain.nodes.size()) {
      throw std::invalid_argument("write_chain: sample size does not match node list");
    }
    out << "sample=" << k << " sweep=" << s.sweep_index << " clusters=" << join(s.clustering.labels())
        << '\n';
  }
}

ChainFile read_chain(std::istream& in) {
  ChainFile chain;
  bool have_method = false;
  bool have_nodes = false;
  for_each_record(in, [&](const Record& r) {
    if (r.has("method")) {
      r.only({"method"});
      chain.method = r.text("method");
      have_method = true;
    } else if (r.has("nodes")) {
      r.only({"nodes"});
      chain.nodes = parse_list<NodeId>(r, "nodes");
      have_nodes = true;
    } else {
      r.only({"sample", "sweep", "clusters"});
      if (!have_nodes) r.fail("sample record before nodes=");
      if (r.integer<std::size_t>("sample") != chain.samples.size()) r.fail("samples out of order");
      const auto raw = parse_list<std::int64_t>(r, "clusters");
      if (raw.size() != chain.nodes.size()) r.fail("clusters length does not match nodes");
      chain.samples.push_back(ChainSample{Clustering::from_labels(raw), r.integer<std::size_t>("sweep")});
    }
  });
  if (!have_method || !have_nodes) throw DataError("chain file: missing method= or nodes= header");
  if (chain.samples.empty()) throw DataError("chain file: no samples");
  return chain;
}

void write_predictions(std::ostream& out, const PredictionTable& predictions) {
  for (const auto& [address, dist] : predictions) {
    check_identifier(address, "address_id");
    std::vector<std::pair<std::string, double>> rows(dist.begin(), dist.end());
    std::stable_sort(rows.begin(), rows.end(),
                     [](const auto& a, const auto& b) { return a.second > b.second; });
    for (const auto& [campaign, p] : rows) {
      if (p <= 0.0) continue;
      out << "address_id=" << address << " campaign_id=" << campaign
          << " probability=" << format_double(p) << '\n';
    }
  }
}

PredictionTable read_predictions(std::istream& in) {
  PredictionTable table;
  for_each_record(in, [&](const Record& r) {
    r.only({"address_id", "campaign_id", "probability"});
    const double p = r.real("probability");
    if (!(p >= 0.0 && p <= 1.0 + 1e-9)) r.fail("probability outside [0, 1]");
    if (!table[r.text("address_id")].emplace(r.text("campaign_id"), p).second) {
      r.fail("duplicate (address, campaign) pair");
    }
  });
  return table;
}

void write_roc(std::ostream& out, const RocCurve& roc) {
  out << "fpr,tpr,threshold\n";
  for (const auto& p : roc.points) {
    out << format_double(p.false_positive_rate) << ',' << format_double(p.true_positive_rate) << ','
        << format_double(p.threshold) << '\n';
  }
}

std::vector<MessageRecord> read_messages_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  return read_messages(in);
}

void write_text_file(const std::filesystem::path& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write " + path.string());
  out << contents;
  if (!out) throw DataError("write failed for " + path.string());
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace mgc
