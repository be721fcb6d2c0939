#include "iga/patch_io.hpp"

#include "iga/errors.hpp"

#include <json.hpp>

#include <fstream>
#include <sstream>

namespace iga {

using nlohmann::json;

namespace {

constexpr const char* kFormat = "igamach-patches";

json side_json(SideRef s) { return json::array({s.patch, side_name(s.side)}); }

SideRef side_from_json(const json& j) {
  return SideRef{j.at(0).get<int>(), side_from_name(j.at(1).get<std::string>())};
}

}  // namespace

std::string domain_to_json(const MultiPatchDomain& domain, const std::vector<std::string>& regions) {
  json doc;
  doc["format"] = kFormat;
  doc["version"] = 1;
  json patches = json::array();
  for (int p = 0; p < domain.num_patches(); ++p) {
    const NurbsPatch& np = domain.patch(p);
    json jp;
    jp["degree"] = {np.knots_u().degree(), np.knots_v().degree()};
    jp["knots_u"] = std::vector<double>(np.knots_u().knots().begin(), np.knots_u().knots().end());
    jp["knots_v"] = std::vector<double>(np.knots_v().knots().begin(), np.knots_v().knots().end());
    json pts = json::array();
    for (const Vec2& c : np.control_net()) pts.push_back({c.x(), c.y()});
    jp["control_points"] = std::move(pts);
    jp["weights"] = std::vector<double>(np.weights().begin(), np.weights().end());
    if (p < static_cast<int>(regions.size())) jp["region"] = regions[p];
    patches.push_back(std::move(jp));
  }
  doc["patches"] = std::move(patches);
  json ifaces = json::array();
  for (const PatchInterface& i : domain.interfaces()) {
    ifaces.push_back({{"a", side_json(i.a)}, {"b", side_json(i.b)}, {"reversed", i.reversed}});
  }
  doc["interfaces"] = std::move(ifaces);
  json bnd = json::array();
  for (const auto& [s, t] : domain.tags()) {
    bnd.push_back({{"patch", s.patch}, {"side", side_name(s.side)}, {"tag", tag_name(t)}});
  }
  doc["boundaries"] = std::move(bnd);
  return doc.dump(1);
}

MultiPatchDomain domain_from_json(const std::string& text, std::vector<std::string>* regions) {
  MultiPatchDomain dom;
  try {
    const json doc = json::parse(text);
    if (doc.value("format", std::string()) != kFormat) throw DomainError("not an igamach patch file");
    if (regions) regions->clear();
    for (const json& jp : doc.at("patches")) {
      const auto deg = jp.at("degree").get<std::vector<int>>();
      if (deg.size() != 2) throw DomainError("patch degree needs two entries");
      KnotVector ku(deg[0], jp.at("knots_u").get<std::vector<double>>());
      KnotVector kv(deg[1], jp.at("knots_v").get<std::vector<double>>());
      std::vector<Vec2> net;
      for (const json& c : jp.at("control_points")) net.emplace_back(c.at(0).get<double>(), c.at(1).get<double>());
      dom.add_patch(NurbsPatch(std::move(ku), std::move(kv), std::move(net), jp.at("weights").get<std::vector<double>>()));
      if (regions) regions->push_back(jp.value("region", std::string()));
    }
    for (const json& ji : doc.value("interfaces", json::array())) {
      dom.add_interface(PatchInterface{side_from_json(ji.at("a")), side_from_json(ji.at("b")), ji.value("reversed", false)});
    }
    for (const json& jb : doc.value("boundaries", json::array())) {
      dom.set_tag(jb.at("patch").get<int>(), side_from_name(jb.at("side").get<std::string>()),
                  tag_from_name(jb.at("tag").get<std::string>()));
    }
  } catch (const json::exception& e) {
    throw DomainError(std::string("malformed patch file: ") + e.what());
  }
  dom.validate();
  return dom;
}

void write_domain(const std::string& path, const MultiPatchDomain& domain, const std::vector<std::string>& regions) {
  std::ofstream f(path);
  if (!f) throw DomainError("cannot write " + path);
  f << domain_to_json(domain, regions) << "\n";
}

MultiPatchDomain read_domain(const std::string& path, std::vector<std::string>* regions) {
  std::ifstream f(path);
  if (!f) throw DomainError("cannot read " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return domain_from_json(ss.str(), regions);
}

}  // namespace iga
