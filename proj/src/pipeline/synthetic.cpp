#include "stepgraph/pipeline/synthetic.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>
#include <utility>

#include "stepgraph/error.hpp"
#include "stepgraph/random.hpp"

namespace stepgraph::pipeline {

using step::Argument;
using step::ArgumentList;
using step::make_enum;
using step::make_inherited;
using step::make_list;
using step::make_number;
using step::make_reference;
using step::make_text;
using step::make_unset;

namespace {

Argument num(double value) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(3) << value;
  return make_number(s.str(), value);
}

Argument inum(long long value) {
  return make_number(std::to_string(value), static_cast<double>(value));
}

Argument ref(long long id) { return make_reference(id); }

/// Appends instances with sequential ids starting at #10 and assembles the
/// finished file with a deterministic header.
class ModelBuilder {
 public:
  long long add(std::string type, ArgumentList args) {
    step::EntityInstance inst;
    inst.id = next_id_++;
    inst.types.push_back(std::move(type));
    inst.args.push_back(std::move(args));
    file_.instances.push_back(std::move(inst));
    return file_.instances.back().id;
  }

  long long add_complex(std::vector<std::pair<std::string, ArgumentList>> parts) {
    step::EntityInstance inst;
    inst.id = next_id_++;
    for (auto& [type, args] : parts) {
      inst.types.push_back(std::move(type));
      inst.args.push_back(std::move(args));
    }
    file_.instances.push_back(std::move(inst));
    return file_.instances.back().id;
  }

  step::StepFile finish(const std::string& part_name) {
    file_.header.push_back(
        {"FILE_DESCRIPTION",
         {make_list({make_text("synthetic part family sample")}), make_text("2;1")}});
    file_.header.push_back({"FILE_NAME",
                            {make_text(part_name), make_text("2026-01-01T00:00:00"),
                             make_list({make_text("stepgraph")}), make_list({make_text("")}),
                             make_text("stepgraph"), make_text("stepgraph"), make_text("")}});
    file_.header.push_back(
        {"FILE_SCHEMA",
         {make_list({make_text("AUTOMOTIVE_DESIGN { 1 0 10303 214 2 1 1}")})}});
    file_.schema_name = "AUTOMOTIVE_DESIGN { 1 0 10303 214 2 1 1}";
    for (std::size_t i = 0; i < file_.instances.size(); ++i) {
      file_.id_index.emplace(file_.instances[i].id, i);
    }
    return std::move(file_);
  }

 private:
  step::StepFile file_;
  long long next_id_ = 10;
};

long long gen_star(ModelBuilder& b, Rng& rng, int units) {
  ArgumentList circle_refs;
  for (int i = 0; i < units; ++i) {
    const long long point = b.add(
        "CARTESIAN_POINT",
        {make_text(""),
         make_list({num(rng.uniform(-50.0, 50.0)), num(rng.uniform(-50.0, 50.0)), num(0.0)})});
    const long long placement =
        b.add("AXIS2_PLACEMENT_3D", {make_text(""), ref(point), make_unset(), make_unset()});
    const long long circle =
        b.add("CIRCLE", {make_text(""), ref(placement), num(rng.uniform(1.0, 20.0))});
    circle_refs.push_back(ref(circle));
  }
  return b.add("GEOMETRIC_CURVE_SET", {make_text("profile"), make_list(std::move(circle_refs))});
}

long long gen_chain(ModelBuilder& b, Rng& rng, int units) {
  const long long dir =
      b.add("DIRECTION", {make_text("axis"), make_list({num(0.0), num(0.0), num(1.0)})});
  std::vector<long long> line_ids;
  for (int i = 0; i < units; ++i) {
    const long long point = b.add(
        "CARTESIAN_POINT",
        {make_text(""), make_list({num(rng.uniform(-50.0, 50.0)), num(rng.uniform(-50.0, 50.0)),
                                   num(rng.uniform(0.0, 100.0))})});
    const long long vec = b.add("VECTOR", {make_text(""), ref(dir), num(rng.uniform(1.0, 10.0))});
    line_ids.push_back(b.add("LINE", {make_text(""), ref(point), ref(vec)}));
  }
  // Segments link tail-to-head, so they are emitted back to front.
  long long next_segment = 0;
  for (int i = units - 1; i >= 0; --i) {
    ArgumentList args{make_enum(".CONTINUOUS."), make_enum(".T."),
                      ref(line_ids[static_cast<std::size_t>(i)])};
    if (next_segment != 0) args.push_back(ref(next_segment));
    next_segment = b.add("COMPOSITE_CURVE_SEGMENT", std::move(args));
  }
  return b.add("COMPOSITE_CURVE",
               {make_text("spine"), make_list({ref(next_segment)}), make_enum(".F.")});
}

long long gen_ring(ModelBuilder& b, Rng& rng, int units, long long base_placement) {
  const long long basis = b.add(
      "ELLIPSE", {make_text("rim"), ref(base_placement), num(rng.uniform(20.0, 40.0)),
                  num(rng.uniform(5.0, 19.0))});
  std::vector<long long> vertices;
  for (int i = 0; i < units; ++i) {
    const long long point = b.add(
        "CARTESIAN_POINT",
        {make_text(""), make_list({num(rng.uniform(-50.0, 50.0)), num(rng.uniform(-50.0, 50.0)),
                                   num(rng.uniform(-5.0, 5.0))})});
    vertices.push_back(b.add("VERTEX_POINT", {make_text(""), ref(point)}));
  }
  ArgumentList oriented_refs;
  for (int i = 0; i < units; ++i) {
    const long long start = vertices[static_cast<std::size_t>(i)];
    const long long end = vertices[static_cast<std::size_t>((i + 1) % units)];
    const long long edge = b.add(
        "EDGE_CURVE", {make_text(""), ref(start), ref(end), ref(basis), make_enum(".T.")});
    const long long oriented = b.add(
        "ORIENTED_EDGE",
        {make_text(""), make_inherited(), make_inherited(), ref(edge), make_enum(".T.")});
    oriented_refs.push_back(ref(oriented));
  }
  return b.add("EDGE_LOOP", {make_text("rim"), make_list(std::move(oriented_refs))});
}

long long gen_tree(ModelBuilder& b, int branches, int leaves_per_branch,
                   long long base_placement) {
  ArgumentList branch_refs;
  for (int j = 0; j < branches; ++j) {
    ArgumentList face_refs;
    for (int i = 0; i < leaves_per_branch; ++i) {
      const long long plane = b.add("PLANE", {make_text(""), ref(base_placement)});
      const long long face = b.add(
          "ADVANCED_FACE", {make_text(""), make_list({}), ref(plane), make_enum(".T.")});
      face_refs.push_back(ref(face));
    }
    branch_refs.push_back(
        ref(b.add("CLOSED_SHELL", {make_text(""), make_list(std::move(face_refs))})));
  }
  const long long shell =
      b.add("CLOSED_SHELL", {make_text("hull"), make_list(std::move(branch_refs))});
  return b.add("MANIFOLD_SOLID_BREP", {make_text("solid"), ref(shell)});
}

long long gen_grid(ModelBuilder& b, Rng& rng, int rows, int cols) {
  // Patches reference their east and south neighbors; emit back to front so
  // every neighbor already exists.
  std::vector<std::vector<long long>> patch(static_cast<std::size_t>(rows),
                                            std::vector<long long>(static_cast<std::size_t>(cols), 0));
  for (int i = rows - 1; i >= 0; --i) {
    for (int j = cols - 1; j >= 0; --j) {
      const long long surface = b.add(
          "B_SPLINE_SURFACE",
          {inum(rng.range(1, 3)), inum(rng.range(1, 3)), make_list({}),
           make_enum(".UNSPECIFIED."), make_enum(".F."), make_enum(".F."), make_enum(".F.")});
      ArgumentList args{make_text(""), ref(surface)};
      if (j + 1 < cols) args.push_back(ref(patch[static_cast<std::size_t>(i)][static_cast<std::size_t>(j + 1)]));
      if (i + 1 < rows) args.push_back(ref(patch[static_cast<std::size_t>(i + 1)][static_cast<std::size_t>(j)]));
      args.push_back(make_enum(".T."));
      patch[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
          b.add("SURFACE_PATCH", std::move(args));
    }
  }
  return b.add("RECTANGULAR_COMPOSITE_SURFACE", {make_text("skin"), make_list({ref(patch[0][0])})});
}

long long gen_fan(ModelBuilder& b, Rng& rng, int units, long long base_placement) {
  const long long torus = b.add(
      "TOROIDAL_SURFACE", {make_text("core"), ref(base_placement),
                           num(rng.uniform(20.0, 40.0)), num(rng.uniform(2.0, 10.0))});
  ArgumentList bound_refs;
  for (int i = 0; i < units; ++i) {
    const long long cylinder = b.add(
        "CYLINDRICAL_SURFACE",
        {make_text(""), ref(base_placement), num(rng.uniform(1.0, 8.0))});
    const long long bound = b.add(
        "FACE_BOUND", {make_text(""), make_list({ref(cylinder), ref(torus)}), make_enum(".T.")});
    bound_refs.push_back(ref(bound));
  }
  const long long shell = b.add("OPEN_SHELL", {make_text("teeth"), make_list(std::move(bound_refs))});
  return b.add("SHELL_BASED_SURFACE_MODEL", {make_text("gear"), make_list({ref(shell)})});
}

}  // namespace

std::vector<SyntheticClassSpec> default_class_specs() {
  return {
      {"washer", TopologyFamily::Star, 4, 8, 0, 0},
      {"shaft", TopologyFamily::Chain, 7, 11, 0, 0},
      {"flange", TopologyFamily::Ring, 12, 16, 0, 0},
      {"bracket", TopologyFamily::Tree, 3, 5, 4, 6},
      {"housing", TopologyFamily::Grid, 3, 5, 3, 5},
      {"gear", TopologyFamily::Fan, 8, 14, 0, 0},
  };
}

step::StepFile synthesize_model(const SyntheticClassSpec& spec, std::uint64_t file_seed,
                                const std::string& part_name) {
  Rng rng(file_seed);
  ModelBuilder b;

  // Product-structure skeleton, ids #10..#21.
  const long long organization =
      b.add("ORGANIZATION", {make_text("O0001"), make_text("stepgraph"), make_text("company")});
  const long long app_context = organization + 2;  // #12, forward-referenced by #11
  b.add("PRODUCT_DEFINITION_CONTEXT",
        {make_text("part definition"), ref(app_context), make_text("design")});
  b.add("APPLICATION_CONTEXT", {make_text("mechanical design")});
  b.add("APPLICATION_PROTOCOL_DEFINITION",
        {make_text(""), make_text("automotive_design"), inum(2010), ref(app_context)});
  const long long product = organization + 6;  // #16
  const long long product_context = organization + 8;  // #18
  b.add("PRODUCT_DEFINITION",
        {make_text("0"), make_unset(), ref(organization + 5), ref(organization + 1)});
  b.add("PRODUCT_DEFINITION_FORMATION", {make_text("1"), make_unset(), ref(product)});
  b.add("PRODUCT", {make_text(part_name), make_text(spec.name), make_text(""),
                    make_list({ref(product_context)})});
  b.add("PRODUCT_RELATED_PRODUCT_CATEGORY",
        {make_text("part"), make_unset(), make_list({ref(product)})});
  b.add("PRODUCT_CONTEXT", {make_text(""), ref(app_context), make_text("")});
  const long long unit = b.add_complex({{"LENGTH_UNIT", {}},
                                        {"NAMED_UNIT", {make_inherited()}},
                                        {"SI_UNIT", {make_enum(".MILLI."), make_enum(".METRE.")}}});
  const long long base_point =
      b.add("CARTESIAN_POINT", {make_text("origin"), make_list({num(0.0), num(0.0), num(0.0)})});
  const long long base_placement = b.add(
      "AXIS2_PLACEMENT_3D", {make_text("base"), ref(base_point), make_unset(), make_unset()});

  const int units = static_cast<int>(rng.range(spec.min_units, spec.max_units));
  long long geometry_root = 0;
  switch (spec.topology) {
    case TopologyFamily::Star:
      geometry_root = gen_star(b, rng, units);
      break;
    case TopologyFamily::Chain:
      geometry_root = gen_chain(b, rng, units);
      break;
    case TopologyFamily::Ring:
      geometry_root = gen_ring(b, rng, units, base_placement);
      break;
    case TopologyFamily::Tree: {
      const int sub = static_cast<int>(rng.range(spec.min_sub, spec.max_sub));
      geometry_root = gen_tree(b, units, sub, base_placement);
      break;
    }
    case TopologyFamily::Grid: {
      const int sub = static_cast<int>(rng.range(spec.min_sub, spec.max_sub));
      geometry_root = gen_grid(b, rng, units, sub);
      break;
    }
    case TopologyFamily::Fan:
      geometry_root = gen_fan(b, rng, units, base_placement);
      break;
  }

  b.add("SHAPE_REPRESENTATION",
        {make_text(""), make_list({ref(base_placement), ref(geometry_root)}), ref(unit)});
  return b.finish(part_name);
}

DatasetManifest generate_synthetic_corpus(const std::filesystem::path& out_dir,
                                          const std::vector<SyntheticClassSpec>& specs,
                                          int count_per_class, std::uint64_t seed) {
  if (specs.size() < 2) {
    throw Error(ErrorCode::InvalidArgument, "a synthetic corpus needs at least 2 classes");
  }
  if (count_per_class < 1) {
    throw Error(ErrorCode::InvalidArgument, "count per class must be positive");
  }

  DatasetManifest manifest;
  manifest.schema = "AP214";
  for (const SyntheticClassSpec& spec : specs) manifest.class_names.push_back(spec.name);

  for (std::size_t c = 0; c < specs.size(); ++c) {
    const SyntheticClassSpec& spec = specs[c];
    std::filesystem::create_directories(out_dir / spec.name);
    for (int i = 0; i < count_per_class; ++i) {
      std::ostringstream name;
      name << spec.name << '_' << std::setw(3) << std::setfill('0') << i;
      const std::uint64_t file_seed =
          derive_seed(seed, c * 1000000ULL + static_cast<std::uint64_t>(i));
      const step::StepFile file = synthesize_model(spec, file_seed, name.str());

      const std::string relative = spec.name + "/" + name.str() + ".step";
      const std::filesystem::path path = out_dir / relative;
      std::ofstream out(path, std::ios::binary);
      if (!out) {
        throw Error(ErrorCode::IoError, "cannot open '" + path.string() + "' for writing");
      }
      out << step::write_text(file);
      if (!out) {
        throw Error(ErrorCode::IoError, "failed writing '" + path.string() + "'");
      }

      ManifestEntry entry;
      entry.path = relative;
      entry.class_id = static_cast<int>(c);
      entry.class_name = spec.name;
      manifest.entries.push_back(std::move(entry));
    }
  }
  validate_manifest(manifest);
  return manifest;
}

}  // namespace stepgraph::pipeline
