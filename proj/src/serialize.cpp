#include "hermbench/serialize.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace hermbench {

using nlohmann::ordered_json;

namespace {

ordered_json geometry_json(const GridGeometry& g) {
  ordered_json j;
  j["container"] = "hermbench.geometry";
  j["version"] = 1;
  if (g.topology() == Topology::PeriodicTorus) {
    j["topology"] = "periodic_torus";
    j["n_complex"] = g.n_complex();
    j["resolution"] = g.resolution();
    j["periods"] = g.periods();
  } else {
    j["topology"] = "truncated_radial";
    j["n_complex"] = g.n_complex();
    j["resolution"] = g.resolution();
    j["radial_model"] = g.radial_model() == RadialModel::HyperbolicDisk
                            ? "hyperbolic_disk"
                            : "euclidean_disk";
    j["truncation_radius"] = g.truncation_radius();
  }
  return j;
}

GeometryPtr geometry_from(const ordered_json& j) {
  if (j.at("container") != "hermbench.geometry")
    throw std::invalid_argument("not a geometry container");
  const std::string topo = j.at("topology");
  if (topo == "periodic_torus") {
    return GridGeometry::make_torus(j.at("n_complex"), j.at("resolution"),
                                    j.at("periods").get<std::vector<double>>());
  }
  const std::string model = j.at("radial_model");
  return GridGeometry::make_radial(model == "hyperbolic_disk"
                                       ? RadialModel::HyperbolicDisk
                                       : RadialModel::EuclideanDisk,
                                   j.at("resolution"),
                                   j.at("truncation_radius"));
}

}  // namespace

std::string geometry_to_json(const GridGeometry& g) {
  return geometry_json(g).dump(2);
}

GeometryPtr geometry_from_json(const std::string& text) {
  return geometry_from(ordered_json::parse(text));
}

std::string field_to_json(const MatrixField& f) {
  if (!f.geometry())
    throw std::invalid_argument("field_to_json: detached field");
  ordered_json j;
  j["container"] = "hermbench.field";
  j["version"] = 1;
  j["geometry"] = geometry_json(*f.geometry());
  j["shape"] = {f.nodes(), static_cast<std::size_t>(f.n()),
                static_cast<std::size_t>(f.n())};
  std::vector<double> re(f.raw().size()), im(f.raw().size());
  for (std::size_t i = 0; i < f.raw().size(); ++i) {
    re[i] = f.raw()[i].real();
    im[i] = f.raw()[i].imag();
  }
  j["data_re"] = re;
  j["data_im"] = im;
  return j.dump();
}

MatrixField field_from_json(const std::string& text) {
  ordered_json j = ordered_json::parse(text);
  if (j.at("container") != "hermbench.field")
    throw std::invalid_argument("not a field container");
  GeometryPtr geom = geometry_from(j.at("geometry"));
  const auto shape = j.at("shape").get<std::vector<std::size_t>>();
  MatrixField f(geom, static_cast<int>(shape.at(1)));
  const auto re = j.at("data_re").get<std::vector<double>>();
  const auto im = j.at("data_im").get<std::vector<double>>();
  if (re.size() != f.raw().size() || im.size() != f.raw().size())
    throw std::invalid_argument("field container shape mismatch");
  for (std::size_t i = 0; i < re.size(); ++i) f.raw()[i] = cplx(re[i], im[i]);
  return f;
}

std::string scalar_to_json(const GeometryPtr& geom, const ScalarField& f) {
  ordered_json j;
  j["container"] = "hermbench.scalar";
  j["version"] = 1;
  j["geometry"] = geometry_json(*geom);
  j["shape"] = {f.size()};
  j["data"] = f;
  return j.dump();
}

ScalarField scalar_from_json(const std::string& text, GeometryPtr* geom_out) {
  ordered_json j = ordered_json::parse(text);
  if (j.at("container") != "hermbench.scalar")
    throw std::invalid_argument("not a scalar container");
  if (geom_out) *geom_out = geometry_from(j.at("geometry"));
  return j.at("data").get<std::vector<double>>();
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open for writing: " + path);
  os << content;
  if (!os) throw std::runtime_error("write failed: " + path);
}

std::string read_text_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open: " + path);
  std::ostringstream os;
  os << is.rdbuf();
  return os.str();
}

}  // namespace hermbench
