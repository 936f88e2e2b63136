#include "equivfuse/backends/backends.h"

#include "equivfuse/core/text.h"
#include "equivfuse/support/error.h"

#include "json.hpp"

namespace equivfuse::backends {

using nlohmann::json;

std::string SymbolMap::toJson() const {
  json j;
  j["format"] = std::string(formatName(format));
  json ins = json::array();
  for (const auto &s : inputs)
    ins.push_back({{"id", s.id}, {"name", s.name}, {"port", s.port}, {"frame", s.frame}, {"width", s.width}});
  j["inputs"] = ins;
  if (replay) {
    const auto &m = *replay;
    json r;
    r["spec_name"] = m.specName;
    r["impl_name"] = m.implName;
    r["mode"] = std::string(miter::modeName(m.mode));
    r["sequential"] = m.sequential;
    r["spec_frames"] = m.specFrames;
    r["impl_frames"] = m.implFrames;
    json cmp = json::array();
    for (const auto &c : m.compared)
      cmp.push_back({{"spec", c.spec}, {"impl", c.impl}, {"port", c.port}, {"spec_frame", c.specFrame},
                     {"impl_frame", c.implFrame}, {"width", c.width}});
    r["compared"] = cmp;
    json ports = json::array();
    for (const auto &p : m.ports.pairs)
      ports.push_back({{"spec", p.spec}, {"impl", p.impl}, {"dir", p.dir == core::PortDir::In ? "in" : "out"},
                       {"width", p.width}});
    r["ports"] = ports;
    json shared = json::array();
    for (const auto &s : m.inputs)
      shared.push_back({{"name", s.name}, {"port", s.port}, {"frame", s.frame}, {"width", s.width}});
    r["shared"] = shared;
    r["spec"] = core::dumpCore(m.spec);
    r["impl"] = core::dumpCore(m.impl);
    j["replay"] = r;
  }
  return j.dump(2) + "\n";
}

SymbolMap SymbolMap::fromJson(std::string_view text) {
  try {
    json j = json::parse(text);
    SymbolMap s;
    auto f = parseFormat(j.at("format").get<std::string>());
    if (!f)
      fail(ErrorKind::ParseFailure, "symbol map: unknown format " + j.at("format").get<std::string>());
    s.format = *f;
    for (const auto &e : j.at("inputs"))
      s.inputs.push_back({e.at("id").get<std::string>(), e.at("name").get<std::string>(),
                          e.at("port").get<std::string>(), e.at("frame").get<unsigned>(), e.at("width").get<unsigned>()});
    if (j.contains("replay")) {
      const json &r = j.at("replay");
      miter::MiterModule m;
      m.specName = r.at("spec_name").get<std::string>();
      m.implName = r.at("impl_name").get<std::string>();
      m.mode = miter::parseMode(r.at("mode").get<std::string>());
      m.sequential = r.at("sequential").get<bool>();
      m.specFrames = r.at("spec_frames").get<unsigned>();
      m.implFrames = r.at("impl_frames").get<unsigned>();
      for (const auto &c : r.at("compared"))
        m.compared.push_back({c.at("spec").get<std::string>(), c.at("impl").get<std::string>(),
                              c.at("port").get<std::string>(), c.at("spec_frame").get<unsigned>(),
                              c.at("impl_frame").get<unsigned>(), c.at("width").get<unsigned>()});
      for (const auto &p : r.at("ports"))
        m.ports.pairs.push_back({p.at("spec").get<std::string>(), p.at("impl").get<std::string>(),
                                 p.at("dir").get<std::string>() == "in" ? core::PortDir::In : core::PortDir::Out,
                                 p.at("width").get<unsigned>()});
      for (const auto &e : r.at("shared"))
        m.inputs.push_back({e.at("name").get<std::string>(), e.at("port").get<std::string>(),
                            e.at("frame").get<unsigned>(), e.at("width").get<unsigned>()});
      m.spec = core::parseCore(r.at("spec").get<std::string>());
      m.impl = core::parseCore(r.at("impl").get<std::string>());
      s.replay = std::move(m);
    }
    return s;
  } catch (const json::exception &e) {
    fail(ErrorKind::ParseFailure, std::string("symbol map: ") + e.what());
  } catch (const Error &e) {
    if (e.kind() == ErrorKind::ParseFailure)
      throw;
    fail(ErrorKind::ParseFailure, std::string("symbol map: ") + e.what());
  }
}

} // namespace equivfuse::backends
