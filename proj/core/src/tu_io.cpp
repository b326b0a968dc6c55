#include "hagcl/tu_io.hpp"

#include <algorithm>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "hagcl/error.hpp"

namespace hagcl {

namespace fs = std::filesystem;

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream is(line);
  while (std::getline(is, field, ',')) out.push_back(trim(field));
  return out;
}

long parse_int(const std::string& field, const std::string& file, std::size_t line_no) {
  long v = 0;
  const char* begin = field.data();
  const char* end = begin + field.size();
  auto [ptr, ec] = std::from_chars(begin, end, v);
  if (ec != std::errc{} || ptr != end)
    throw DataError(file + ":" + std::to_string(line_no) + ": expected an integer, got '" + field +
                    "'");
  return v;
}

double parse_real(const std::string& field, const std::string& file, std::size_t line_no) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(field, &pos);
    if (pos != field.size()) throw std::invalid_argument(field);
    return v;
  } catch (const std::exception&) {
    throw DataError(file + ":" + std::to_string(line_no) + ": expected a real number, got '" +
                    field + "'");
  }
}

// Reads all non-empty lines; a missing mandatory file raises DataError.
std::vector<std::string> read_lines(const fs::path& path, bool mandatory) {
  std::ifstream in(path);
  if (!in) {
    if (mandatory) throw DataError("missing dataset file: " + path.string());
    return {};
  }
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    line = trim(line);
    if (!line.empty()) lines.push_back(line);
  }
  return lines;
}

}  // namespace

TuDataset parse_tu_dataset(const std::string& directory, const std::string& name) {
  const fs::path dir(directory);
  const auto file = [&](const std::string& suffix) { return dir / (name + "_" + suffix); };

  const std::string indicator_name = file("graph_indicator.txt").string();
  const std::string adjacency_name = file("A.txt").string();
  const std::string labels_name = file("graph_labels.txt").string();

  const auto indicator_lines = read_lines(indicator_name, true);
  const auto adjacency_lines = read_lines(adjacency_name, true);
  const auto label_lines = read_lines(labels_name, true);

  if (fs::exists(file("edge_labels.txt")) || fs::exists(file("edge_attributes.txt")))
    std::clog << "[hagcl] " << name << ": edge label/attribute files present but ignored\n";

  const std::size_t num_nodes = indicator_lines.size();
  const std::size_t num_graphs = label_lines.size();
  if (num_graphs == 0) throw DataError(labels_name + ": no graphs");

  // graph id and local node index per global node (1-indexed input).
  std::vector<std::size_t> node_graph(num_nodes);
  std::vector<std::size_t> node_local(num_nodes);
  std::vector<std::size_t> graph_sizes(num_graphs, 0);
  for (std::size_t i = 0; i < num_nodes; ++i) {
    const long g = parse_int(indicator_lines[i], indicator_name, i + 1);
    if (g < 1 || static_cast<std::size_t>(g) > num_graphs)
      throw DataError(indicator_name + ":" + std::to_string(i + 1) + ": graph id " +
                      std::to_string(g) + " outside [1, " + std::to_string(num_graphs) + "]");
    node_graph[i] = static_cast<std::size_t>(g - 1);
    node_local[i] = graph_sizes[node_graph[i]]++;
  }

  // Node labels -> one-hot columns (sorted by label value).
  const std::string node_labels_name = file("node_labels.txt").string();
  const auto node_label_lines = read_lines(node_labels_name, false);
  std::vector<long> node_labels;
  std::map<long, std::size_t> label_to_hot;
  if (!node_label_lines.empty()) {
    if (node_label_lines.size() != num_nodes)
      throw DataError(node_labels_name + ": " + std::to_string(node_label_lines.size()) +
                      " lines for " + std::to_string(num_nodes) + " nodes");
    node_labels.reserve(num_nodes);
    for (std::size_t i = 0; i < num_nodes; ++i)
      node_labels.push_back(parse_int(node_label_lines[i], node_labels_name, i + 1));
    for (long v : node_labels) label_to_hot.emplace(v, 0);
    std::size_t next = 0;
    for (auto& [v, slot] : label_to_hot) slot = next++;
  }

  // Node attributes -> real columns.
  const std::string node_attr_name = file("node_attributes.txt").string();
  const auto node_attr_lines = read_lines(node_attr_name, false);
  std::vector<std::vector<double>> node_attrs;
  std::size_t attr_dim = 0;
  if (!node_attr_lines.empty()) {
    if (node_attr_lines.size() != num_nodes)
      throw DataError(node_attr_name + ": " + std::to_string(node_attr_lines.size()) +
                      " lines for " + std::to_string(num_nodes) + " nodes");
    node_attrs.reserve(num_nodes);
    for (std::size_t i = 0; i < num_nodes; ++i) {
      const auto fields = split_csv(node_attr_lines[i]);
      if (i == 0) attr_dim = fields.size();
      if (fields.size() != attr_dim)
        throw DataError(node_attr_name + ":" + std::to_string(i + 1) + ": expected " +
                        std::to_string(attr_dim) + " attributes, got " +
                        std::to_string(fields.size()));
      std::vector<double> row;
      row.reserve(attr_dim);
      for (const auto& f : fields) row.push_back(parse_real(f, node_attr_name, i + 1));
      node_attrs.push_back(std::move(row));
    }
  }

  const std::size_t onehot_dim = label_to_hot.size();
  const bool has_features = onehot_dim + attr_dim > 0;
  const std::size_t feature_dim = has_features ? onehot_dim + attr_dim : 1;

  // Graph labels remapped to contiguous [0, num_classes).
  std::vector<long> raw_graph_labels(num_graphs);
  std::map<long, int> class_map;
  for (std::size_t g = 0; g < num_graphs; ++g) {
    raw_graph_labels[g] = parse_int(label_lines[g], labels_name, g + 1);
    class_map.emplace(raw_graph_labels[g], 0);
  }
  int next_class = 0;
  for (auto& [v, id] : class_map) id = next_class++;
  if (class_map.size() < 2) throw DataError(labels_name + ": fewer than 2 classes");

  TuDataset ds;
  ds.name = name;
  ds.graphs.resize(num_graphs);
  for (std::size_t g = 0; g < num_graphs; ++g) {
    ds.graphs[g].node_features = Array({graph_sizes[g], feature_dim});
    ds.graphs[g].label = class_map.at(raw_graph_labels[g]);
    ds.graphs[g].graph_id = g;
  }
  for (std::size_t i = 0; i < num_nodes; ++i) {
    Graph& g = ds.graphs[node_graph[i]];
    if (!has_features) {
      g.node_features.at(node_local[i], 0) = 1.0;
      continue;
    }
    if (onehot_dim > 0) g.node_features.at(node_local[i], label_to_hot.at(node_labels[i])) = 1.0;
    for (std::size_t c = 0; c < attr_dim; ++c)
      g.node_features.at(node_local[i], onehot_dim + c) = node_attrs[i][c];
  }

  for (std::size_t ln = 0; ln < adjacency_lines.size(); ++ln) {
    const auto fields = split_csv(adjacency_lines[ln]);
    if (fields.size() != 2)
      throw DataError(adjacency_name + ":" + std::to_string(ln + 1) +
                      ": expected 'u, v', got '" + adjacency_lines[ln] + "'");
    const long u = parse_int(fields[0], adjacency_name, ln + 1);
    const long v = parse_int(fields[1], adjacency_name, ln + 1);
    if (u < 1 || static_cast<std::size_t>(u) > num_nodes || v < 1 ||
        static_cast<std::size_t>(v) > num_nodes)
      throw DataError(adjacency_name + ":" + std::to_string(ln + 1) + ": node id outside [1, " +
                      std::to_string(num_nodes) + "]");
    const std::size_t ui = static_cast<std::size_t>(u - 1);
    const std::size_t vi = static_cast<std::size_t>(v - 1);
    if (node_graph[ui] != node_graph[vi])
      throw DataError(adjacency_name + ":" + std::to_string(ln + 1) + ": arc (" +
                      std::to_string(u) + ", " + std::to_string(v) +
                      ") crosses graphs per the indicator");
    ds.graphs[node_graph[ui]].arcs.emplace_back(node_local[ui], node_local[vi]);
  }

  ds.stats = compute_stats(
      ds.graphs, has_features ? std::optional<std::size_t>(feature_dim) : std::nullopt);
  return ds;
}

void write_tu_dataset(const std::string& directory, const std::string& name,
                      const std::vector<Graph>& graphs, bool include_attributes) {
  const fs::path dir(directory);
  fs::create_directories(dir);
  const auto open = [&](const std::string& suffix) {
    std::ofstream out(dir / (name + "_" + suffix));
    if (!out) throw DataError("cannot write dataset file under " + directory);
    return out;
  };

  auto adjacency = open("A.txt");
  auto indicator = open("graph_indicator.txt");
  auto labels = open("graph_labels.txt");
  std::ofstream attributes;
  if (include_attributes) {
    attributes = open("node_attributes.txt");
    attributes.precision(17);
  }

  std::size_t node_offset = 0;
  for (std::size_t g = 0; g < graphs.size(); ++g) {
    const Graph& graph = graphs[g];
    labels << graph.label << "\n";
    for (std::size_t r = 0; r < graph.num_nodes(); ++r) {
      indicator << (g + 1) << "\n";
      if (include_attributes) {
        for (std::size_t c = 0; c < graph.feature_dim(); ++c) {
          if (c) attributes << ", ";
          attributes << graph.node_features.at(r, c);
        }
        attributes << "\n";
      }
    }
    for (const auto& [u, v] : graph.arcs)
      adjacency << (node_offset + u + 1) << ", " << (node_offset + v + 1) << "\n";
    node_offset += graph.num_nodes();
  }
}

}  // namespace hagcl
