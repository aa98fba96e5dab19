#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "oromet/csv.hpp"
#include "oromet/error.hpp"
#include "oromet/text_num.hpp"

namespace oromet::wikidata {

inline constexpr const char* kDefaultEndpoint = "https://query.wikidata.org/sparql";
inline constexpr const char* kEndpointEnvVar = "OROMET_SPARQL_ENDPOINT";

struct RawMunicipalityRecord {
  std::string qid;
  std::string name;
  double latitude = 0.0;
  double longitude = 0.0;
  long long population = 0;
};

struct UniversityRecord {
  std::string qid;
  std::string name;
  std::vector<std::string> admin_qids;  // P131 values
  std::vector<std::string> hq_qids;     // P159 values
};

/// Municipality qids labeled as university locations, plus the leftovers
/// that need manual attention instead of being dropped silently.
struct UniversityLocationSet {
  std::set<std::string> labeled;
  std::vector<std::string> unresolved;     // properties set, none resolves to a municipality
  std::vector<std::string> no_properties;  // neither P131 nor P159
};

namespace detail {

inline std::string country_entity(const std::string& country) {
  if (country == "de") return "Q183";
  if (country == "fr") return "Q142";
  throw ValidationError("unsupported country '" + country + "' (expected de or fr)");
}

/// "http://www.wikidata.org/entity/Q64" -> "Q64"; bare qids pass through.
inline std::string qid_from_uri(const std::string& uri) {
  const auto pos = uri.find_last_of('/');
  return pos == std::string::npos ? uri : uri.substr(pos + 1);
}

/// WKT literal "Point(lon lat)".
inline std::pair<double, double> parse_wkt_point(const std::string& wkt) {
  const auto open = wkt.find('(');
  const auto close = wkt.find(')');
  const auto space = wkt.find(' ', open);
  if (wkt.rfind("Point", 0) != 0 || open == std::string::npos || close == std::string::npos ||
      space == std::string::npos || space > close)
    throw ParseError("malformed WKT point literal: '" + wkt + "'");
  const double lon = parse_double(std::string_view(wkt).substr(open + 1, space - open - 1), "WKT longitude");
  const double lat = parse_double(std::string_view(wkt).substr(space + 1, close - space - 1), "WKT latitude");
  return {lat, lon};
}

struct ParsedUrl {
  std::string scheme_host;  // e.g. "https://query.wikidata.org"
  std::string path;         // e.g. "/sparql"
};

inline ParsedUrl split_endpoint(const std::string& endpoint) {
  const auto scheme_end = endpoint.find("://");
  if (scheme_end == std::string::npos)
    throw ValidationError("endpoint URL must start with http:// or https://: '" + endpoint + "'");
  const auto path_start = endpoint.find('/', scheme_end + 3);
  if (path_start == std::string::npos) return {endpoint, "/"};
  return {endpoint.substr(0, path_start), endpoint.substr(path_start)};
}

}  // namespace detail

/// Rows of a SPARQL-results JSON document: variable name -> value per row.
using ResultRow = std::map<std::string, std::string>;

inline std::vector<ResultRow> parse_sparql_results(const std::string& body) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(body);
  } catch (const nlohmann::json::exception& e) {
    const std::string fragment = body.substr(0, std::min<std::size_t>(body.size(), 120));
    throw ParseError(std::string("SPARQL results are not valid JSON: ") + e.what() +
                     "; body begins '" + fragment + "'");
  }
  if (!doc.contains("results") || !doc["results"].contains("bindings"))
    throw ParseError("SPARQL results JSON lacks results.bindings; document begins '" +
                     doc.dump().substr(0, 120) + "'");
  std::vector<ResultRow> rows;
  for (const auto& binding : doc["results"]["bindings"]) {
    ResultRow row;
    for (const auto& [var, cell] : binding.items()) {
      if (!cell.contains("value"))
        throw ParseError("binding for '" + var + "' lacks a value: '" + cell.dump() + "'");
      row[var] = cell["value"].get<std::string>();
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

/// Municipalities (Q15284 transitively) of the country with population,
/// coordinates and labels.  The population floor lives in the query.
inline std::string municipalities_query(const std::string& country) {
  const std::string entity = detail::country_entity(country);
  return "SELECT ?item ?itemLabel ?coord ?population WHERE {\n"
         "  ?item wdt:P31/wdt:P279* wd:Q15284 .\n"
         "  ?item wdt:P17 wd:" + entity + " .\n"
         "  ?item wdt:P1082 ?population .\n"
         "  ?item wdt:P625 ?coord .\n"
         "  FILTER(?population > 5000)\n"
         "  SERVICE wikibase:label { bd:serviceParam wikibase:language \"en\". }\n"
         "}\n";
}

inline std::string universities_query(const std::string& country) {
  const std::string entity = detail::country_entity(country);
  return "SELECT ?item ?itemLabel ?admin ?hq WHERE {\n"
         "  ?item wdt:P31/wdt:P279* wd:Q3918 .\n"
         "  ?item wdt:P17 wd:" + entity + " .\n"
         "  OPTIONAL { ?item wdt:P131 ?admin . }\n"
         "  OPTIONAL { ?item wdt:P159 ?hq . }\n"
         "  SERVICE wikibase:label { bd:serviceParam wikibase:language \"en\". }\n"
         "}\n";
}

/// POSTs a query to the endpoint and returns the response body.
inline std::string execute_sparql(const std::string& endpoint, const std::string& query,
                                  int timeout_seconds = 120) {
  const auto url = detail::split_endpoint(endpoint);
  httplib::Client client(url.scheme_host);
  client.set_connection_timeout(timeout_seconds, 0);
  client.set_read_timeout(timeout_seconds, 0);
  client.set_follow_location(true);
  httplib::Params params{{"query", query}, {"format", "json"}};
  httplib::Headers headers{{"Accept", "application/sparql-results+json"},
                           {"User-Agent", "oromet/0.1 (orometric valuation toolkit)"}};
  auto res = client.Post(url.path, headers, params);
  if (!res)
    throw TransportError("request to " + endpoint + " failed: " + httplib::to_string(res.error()));
  if (res->status != 200)
    throw TransportError("endpoint " + endpoint + " answered HTTP " + std::to_string(res->status));
  return res->body;
}

inline std::vector<RawMunicipalityRecord> parse_municipality_rows(
    const std::vector<ResultRow>& rows) {
  // Collapse duplicate qids (multiple population statements) keeping the
  // largest population; Wikidata routinely stores historical values too.
  std::map<std::string, RawMunicipalityRecord> by_qid;
  for (const auto& row : rows) {
    const auto item = row.find("item");
    const auto coord = row.find("coord");
    const auto population = row.find("population");
    if (item == row.end() || coord == row.end() || population == row.end())
      throw ParseError("municipality binding lacks item/coord/population variables");
    RawMunicipalityRecord rec;
    rec.qid = detail::qid_from_uri(item->second);
    const auto label = row.find("itemLabel");
    rec.name = label == row.end() ? rec.qid : label->second;
    const auto [lat, lon] = detail::parse_wkt_point(coord->second);
    rec.latitude = lat;
    rec.longitude = lon;
    rec.population = static_cast<long long>(parse_double(population->second, "population"));
    auto [it, inserted] = by_qid.emplace(rec.qid, rec);
    if (!inserted && rec.population > it->second.population) it->second = rec;
  }
  std::vector<RawMunicipalityRecord> records;
  records.reserve(by_qid.size());
  for (auto& [qid, rec] : by_qid) records.push_back(std::move(rec));
  return records;
}

/// Live fetch.  An empty result set is treated as a wrong query rather than
/// an empty country; matching on too narrow a class is the known pitfall.
inline std::vector<RawMunicipalityRecord> fetch_municipalities(const std::string& endpoint,
                                                               const std::string& country) {
  const std::string body = execute_sparql(endpoint, municipalities_query(country));
  const auto rows = parse_sparql_results(body);
  if (rows.empty())
    throw ValidationError("suspicious query: endpoint returned zero municipalities for '" +
                          country + "'; check the class/property constraints");
  return parse_municipality_rows(rows);
}

inline std::vector<UniversityRecord> parse_university_rows(const std::vector<ResultRow>& rows) {
  std::map<std::string, UniversityRecord> by_qid;
  for (const auto& row : rows) {
    const auto item = row.find("item");
    if (item == row.end()) throw ParseError("university binding lacks the item variable");
    const std::string qid = detail::qid_from_uri(item->second);
    auto& rec = by_qid[qid];
    rec.qid = qid;
    const auto label = row.find("itemLabel");
    if (rec.name.empty()) rec.name = label == row.end() ? qid : label->second;
    if (const auto admin = row.find("admin"); admin != row.end()) {
      const std::string value = detail::qid_from_uri(admin->second);
      if (std::find(rec.admin_qids.begin(), rec.admin_qids.end(), value) == rec.admin_qids.end())
        rec.admin_qids.push_back(value);
    }
    if (const auto hq = row.find("hq"); hq != row.end()) {
      const std::string value = detail::qid_from_uri(hq->second);
      if (std::find(rec.hq_qids.begin(), rec.hq_qids.end(), value) == rec.hq_qids.end())
        rec.hq_qids.push_back(value);
    }
  }
  std::vector<UniversityRecord> records;
  records.reserve(by_qid.size());
  for (auto& [qid, rec] : by_qid) records.push_back(std::move(rec));
  return records;
}

inline std::vector<UniversityRecord> fetch_universities(const std::string& endpoint,
                                                        const std::string& country) {
  const std::string body = execute_sparql(endpoint, universities_query(country));
  return parse_university_rows(parse_sparql_results(body));
}

struct MainlandFilterResult {
  std::vector<RawMunicipalityRecord> kept;
  std::size_t dropped = 0;
};

/// Approximating square around mainland France (Corsica included).
inline constexpr double kFranceLatMin = 41.0;
inline constexpr double kFranceLatMax = 51.5;
inline constexpr double kFranceLonMin = -5.6;
inline constexpr double kFranceLonMax = 9.9;

inline MainlandFilterResult filter_mainland_france(std::vector<RawMunicipalityRecord> records) {
  MainlandFilterResult result;
  for (auto& rec : records) {
    const bool inside = rec.latitude >= kFranceLatMin && rec.latitude <= kFranceLatMax &&
                        rec.longitude >= kFranceLonMin && rec.longitude <= kFranceLonMax;
    if (inside)
      result.kept.push_back(std::move(rec));
    else
      ++result.dropped;
  }
  return result;
}

/// Manual mapping university qid -> municipality qid for the cases where
/// P131/P159 only reach entities above municipality level.
using OverrideMap = std::vector<std::pair<std::string, std::string>>;

inline OverrideMap parse_overrides(const std::string& text, const std::string& path) {
  OverrideMap overrides;
  for (const auto& row : csv::parse(text)) {
    if (row.fields.size() == 1 && row.fields[0].empty()) continue;
    if (row.fields.size() != 2)
      throw ParseError(path + ": line " + std::to_string(row.line) +
                       ": expected 'university_qid,municipality_qid'");
    if (row.fields[0] == "university_qid") continue;  // optional header
    overrides.emplace_back(row.fields[0], row.fields[1]);
  }
  return overrides;
}

/// A municipality is a university location iff some university's P131 or
/// P159 chain resolves to it, directly or through the override file.
inline UniversityLocationSet match_universities(const std::vector<UniversityRecord>& universities,
                                                const std::set<std::string>& municipality_qids,
                                                const OverrideMap& overrides = {}) {
  UniversityLocationSet result;
  std::set<std::string> known_universities;
  for (const auto& uni : universities) {
    known_universities.insert(uni.qid);
    std::vector<std::string> candidates = uni.admin_qids;
    candidates.insert(candidates.end(), uni.hq_qids.begin(), uni.hq_qids.end());
    if (candidates.empty()) {
      result.no_properties.push_back(uni.qid);
      continue;
    }
    bool matched = false;
    for (const auto& qid : candidates) {
      if (municipality_qids.count(qid)) {
        result.labeled.insert(qid);
        matched = true;
      }
    }
    if (!matched) result.unresolved.push_back(uni.qid);
  }

  for (const auto& [uni_qid, muni_qid] : overrides) {
    if (!known_universities.count(uni_qid))
      throw ValidationError("override references unknown university qid '" + uni_qid + "'");
    if (!municipality_qids.count(muni_qid))
      throw ValidationError("override references unknown municipality qid '" + muni_qid + "'");
    result.labeled.insert(muni_qid);
    result.unresolved.erase(
        std::remove(result.unresolved.begin(), result.unresolved.end(), uni_qid),
        result.unresolved.end());
  }
  return result;
}

}  // namespace oromet::wikidata
