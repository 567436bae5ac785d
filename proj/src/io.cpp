#include "sentinel/io.hpp"

#include "sentinel/errors.hpp"

#include <fstream>
#include <sstream>

namespace sentinel::io {

using nlohmann::json;

namespace {

std::size_t read_size(const json& doc) {
  if (!doc.is_object() || !doc.contains("n") || !doc["n"].is_number_integer() ||
      doc["n"].get<long long>() < 1) {
    throw Error(ErrorCode::ParseError, "expected a positive integer field \"n\"");
  }
  return doc["n"].get<std::size_t>();
}

}  // namespace

json chain_to_json(const MarkovChain& chain, std::optional<ChainFormat> format) {
  const ChainFormat chosen = format.value_or(
      chain.storage() == Storage::Dense ? ChainFormat::Dense : ChainFormat::Triplets);
  json doc;
  doc["n"] = chain.n();
  if (chosen == ChainFormat::Dense) {
    doc["format"] = "dense";
    const DenseMatrix m = chain.to_dense();
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      json r = json::array();
      for (Eigen::Index j = 0; j < m.cols(); ++j) r.push_back(m(i, j));
      rows.push_back(std::move(r));
    }
    doc["data"] = std::move(rows);
  } else {
    doc["format"] = "triplets";
    json data = json::array();
    for (const auto& t : chain.triplets()) data.push_back(json::array({t.row, t.col, t.prob}));
    doc["data"] = std::move(data);
  }
  return doc;
}

MarkovChain chain_from_json(const json& doc, StoragePolicy policy) {
  const std::size_t n = read_size(doc);
  if (!doc.contains("format") || !doc["format"].is_string() || !doc.contains("data") ||
      !doc["data"].is_array()) {
    throw Error(ErrorCode::ParseError, "chain needs \"format\" and \"data\" fields");
  }
  const auto format = doc["format"].get<std::string>();
  const json& data = doc["data"];
  try {
    if (format == "dense") {
      if (data.size() != n) throw Error(ErrorCode::NonSquare, "row count differs from n");
      return validate_chain(data.get<std::vector<std::vector<double>>>(), kRowTolerance, policy);
    }
    if (format == "triplets") {
      std::vector<Triplet> triplets;
      triplets.reserve(data.size());
      for (const auto& item : data) {
        if (!item.is_array() || item.size() != 3 || !item[0].is_number_integer() ||
            !item[1].is_number_integer() || !item[2].is_number()) {
          throw Error(ErrorCode::ParseError, "triplet must be [row, col, prob]");
        }
        if (item[0].get<long long>() < 0 || item[1].get<long long>() < 0) {
          throw Error(ErrorCode::IndexOutOfBounds, "negative triplet index");
        }
        triplets.push_back({item[0].get<std::size_t>(), item[1].get<std::size_t>(),
                            item[2].get<double>()});
      }
      return validate_chain(n, std::move(triplets), kRowTolerance, policy);
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError, e.what());
  }
  throw Error(ErrorCode::ParseError, "unknown chain format \"" + format + "\"");
}

json dist_to_json(const Dist& dist) {
  json doc;
  doc["n"] = dist.size();
  json values = json::array();
  for (std::size_t i = 0; i < dist.size(); ++i) values.push_back(dist[i]);
  doc["values"] = std::move(values);
  return doc;
}

Dist dist_from_json(const json& doc) {
  const std::size_t n = read_size(doc);
  if (!doc.contains("values") || !doc["values"].is_array()) {
    throw Error(ErrorCode::ParseError, "distribution needs a \"values\" array");
  }
  const json& values = doc["values"];
  if (values.size() != n) throw Error(ErrorCode::LengthMismatch, "values length differs from n");
  Vector v(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    if (!values[i].is_number()) throw Error(ErrorCode::ParseError, "non-numeric probability");
    v[static_cast<Eigen::Index>(i)] = values[i].get<double>();
  }
  return Dist::from_values(std::move(v));
}

std::string dump(const json& doc) { return doc.dump(2) + "\n"; }

json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::ParseError, "cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError, path.string() + ": " + e.what());
  }
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::ParseError, "cannot write " + path.string());
  out << text;
}

MarkovChain read_chain(const std::filesystem::path& path, StoragePolicy policy) {
  return chain_from_json(read_json(path), policy);
}

void write_chain(const std::filesystem::path& path, const MarkovChain& chain,
                 std::optional<ChainFormat> format) {
  write_text(path, dump(chain_to_json(chain, format)));
}

Dist read_dist(const std::filesystem::path& path) { return dist_from_json(read_json(path)); }

void write_dist(const std::filesystem::path& path, const Dist& dist) {
  write_text(path, dump(dist_to_json(dist)));
}

}  // namespace sentinel::io
