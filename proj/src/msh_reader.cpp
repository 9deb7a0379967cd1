#include "femtet/msh_reader.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>
#include <unordered_map>

#include "femtet/error.hpp"

namespace femtet {
namespace msh {
namespace {

bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '\f' ||
         c == '\v';
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_tokens(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && is_space(line[i])) ++i;
    std::size_t j = i;
    while (j < line.size() && !is_space(line[j])) ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

[[noreturn]] void malformed(std::string_view section, const std::string& what) {
  throw Error(ErrorKind::MalformedSection,
              "$" + std::string(section) + ": " + what);
}

/// Line cursor over the body of one `$Name ... $EndName` section.
class SectionCursor {
 public:
  SectionCursor(std::string_view name, std::vector<std::string_view> lines)
      : name_(name), lines_(std::move(lines)) {}

  bool done() const { return pos_ >= lines_.size(); }

  std::string_view raw_line() {
    if (done()) malformed(name_, "unexpected end of section");
    return lines_[pos_++];
  }

  std::vector<std::string_view> tokens() { return split_tokens(raw_line()); }

  /// Next line, required to hold exactly `count` tokens.
  std::vector<std::string_view> tokens(std::size_t count) {
    auto t = tokens();
    if (t.size() != count) {
      malformed(name_, "expected " + std::to_string(count) +
                           " values on a line, found " +
                           std::to_string(t.size()));
    }
    return t;
  }

  template <typename Int>
  Int to_int(std::string_view tok) const {
    Int v{};
    auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc() || p != tok.data() + tok.size()) {
      malformed(name_, "invalid integer '" + std::string(tok) + "'");
    }
    return v;
  }

  double to_double(std::string_view tok) const {
    double v{};
    auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc() || p != tok.data() + tok.size()) {
      malformed(name_, "invalid number '" + std::string(tok) + "'");
    }
    return v;
  }

  void expect_exhausted() const {
    if (!done()) malformed(name_, "trailing data after declared records");
  }

  std::string_view name() const { return name_; }

 private:
  std::string_view name_;
  std::vector<std::string_view> lines_;
  std::size_t pos_ = 0;
};

struct Sections {
  std::vector<std::pair<std::string_view, std::vector<std::string_view>>> list;

  const std::vector<std::string_view>* find(std::string_view name) const {
    for (const auto& [n, body] : list) {
      if (n == name) return &body;
    }
    return nullptr;
  }
};

Sections split_sections(std::string_view text) {
  Sections out;
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    lines.push_back(trim(text.substr(start, end - start)));
    start = end + 1;
  }

  std::size_t i = 0;
  while (i < lines.size()) {
    std::string_view line = lines[i];
    if (line.empty()) {
      ++i;
      continue;
    }
    if (line.front() != '$') {
      throw Error(ErrorKind::MalformedSection,
                  "content outside a section: '" + std::string(line) + "'");
    }
    std::string_view name = line.substr(1);
    const std::string end_marker = "$End" + std::string(name);
    std::vector<std::string_view> body;
    ++i;
    bool closed = false;
    while (i < lines.size()) {
      if (lines[i] == end_marker) {
        closed = true;
        ++i;
        break;
      }
      if (!lines[i].empty()) body.push_back(lines[i]);
      ++i;
    }
    if (!closed) {
      throw Error(ErrorKind::MalformedSection,
                  "$" + std::string(name) + ": missing " + end_marker);
    }
    out.list.emplace_back(name, std::move(body));
  }
  return out;
}

// Checked before the rest of the file is split into sections, so binary
// payloads following an ASCII header are rejected cleanly.
void parse_mesh_format(std::string_view text) {
  const std::size_t at = text.find("$MeshFormat");
  if (at == std::string_view::npos) {
    throw Error(ErrorKind::MalformedSection, "missing $MeshFormat section");
  }
  const std::size_t eol = text.find('\n', at);
  if (eol == std::string_view::npos) malformed("MeshFormat", "truncated");
  std::size_t next = text.find('\n', eol + 1);
  if (next == std::string_view::npos) next = text.size();
  SectionCursor cur("MeshFormat", {trim(text.substr(eol + 1, next - eol - 1))});
  auto tok = cur.tokens();
  if (tok.size() < 3) malformed("MeshFormat", "expected 'version type size'");
  if (tok[0] != "4.1") {
    throw Error(ErrorKind::UnsupportedVersion,
                "mesh format version " + std::string(tok[0]) +
                    " (only 4.1 is supported)");
  }
  const int file_type = cur.to_int<int>(tok[1]);
  if (file_type == 1) {
    throw Error(ErrorKind::BinaryNotSupported,
                "binary .msh files are not supported");
  }
  if (file_type != 0) malformed("MeshFormat", "unknown file-type");
}

std::vector<PhysicalGroup> parse_physical_names(
    const std::vector<std::string_view>& body) {
  SectionCursor cur("PhysicalNames", body);
  const auto count = cur.to_int<std::size_t>(cur.tokens(1)[0]);
  std::vector<PhysicalGroup> groups;
  std::set<std::pair<int, int>> seen;
  for (std::size_t g = 0; g < count; ++g) {
    std::string_view line = cur.raw_line();
    auto tok = split_tokens(line);
    if (tok.size() < 3) malformed(cur.name(), "expected 'dim tag \"name\"'");
    PhysicalGroup grp;
    grp.dim = cur.to_int<int>(tok[0]);
    grp.tag = cur.to_int<int>(tok[1]);
    // The name is the remainder of the line and may contain spaces.
    std::string_view rest = trim(line.substr(
        static_cast<std::size_t>(tok[2].data() - line.data())));
    if (rest.size() >= 2 && rest.front() == '"' && rest.back() == '"') {
      rest = rest.substr(1, rest.size() - 2);
    }
    grp.name = std::string(rest);
    if (grp.dim < 0 || grp.dim > 3) malformed(cur.name(), "invalid dimension");
    if (grp.tag <= 0) malformed(cur.name(), "physical tags must be positive");
    if (grp.name.empty()) malformed(cur.name(), "empty physical name");
    if (!seen.insert({grp.dim, grp.tag}).second) {
      malformed(cur.name(), "duplicate physical tag " + std::to_string(grp.tag));
    }
    groups.push_back(std::move(grp));
  }
  cur.expect_exhausted();
  return groups;
}

std::array<std::vector<EntityRecord>, 4> parse_entities(
    const std::vector<std::string_view>& body) {
  SectionCursor cur("Entities", body);
  auto head = cur.tokens(4);
  std::array<std::size_t, 4> counts{};
  for (int d = 0; d < 4; ++d) counts[d] = cur.to_int<std::size_t>(head[d]);

  std::array<std::vector<EntityRecord>, 4> out;
  for (int d = 0; d < 4; ++d) {
    for (std::size_t e = 0; e < counts[d]; ++e) {
      auto tok = cur.tokens();
      std::size_t k = 0;
      auto take = [&]() -> std::string_view {
        if (k >= tok.size()) malformed(cur.name(), "truncated entity record");
        return tok[k++];
      };
      EntityRecord rec;
      rec.dim = d;
      rec.tag = cur.to_int<int>(take());
      for (int c = 0; c < 3; ++c) rec.bbox_min[c] = cur.to_double(take());
      if (d == 0) {
        rec.bbox_max = rec.bbox_min;
      } else {
        for (int c = 0; c < 3; ++c) rec.bbox_max[c] = cur.to_double(take());
      }
      const auto n_phys = cur.to_int<std::size_t>(take());
      for (std::size_t p = 0; p < n_phys; ++p) {
        rec.physical_tags.push_back(cur.to_int<int>(take()));
      }
      if (d > 0) {
        const auto n_bound = cur.to_int<std::size_t>(take());
        for (std::size_t b = 0; b < n_bound; ++b) {
          rec.bounding_entities.push_back(cur.to_int<int>(take()));
        }
      }
      if (k != tok.size()) malformed(cur.name(), "trailing values in entity");
      out[d].push_back(std::move(rec));
    }
  }
  cur.expect_exhausted();
  return out;
}

void parse_nodes(const std::vector<std::string_view>& body, ParsedMesh& mesh) {
  SectionCursor cur("Nodes", body);
  auto head = cur.tokens(4);
  const auto num_blocks = cur.to_int<std::size_t>(head[0]);
  mesh.num_nodes = cur.to_int<std::size_t>(head[1]);

  std::size_t total = 0;
  for (std::size_t b = 0; b < num_blocks; ++b) {
    auto bh = cur.tokens(4);
    NodeBlock block;
    block.entity_dim = cur.to_int<int>(bh[0]);
    block.entity_tag = cur.to_int<int>(bh[1]);
    const int parametric = cur.to_int<int>(bh[2]);
    const auto n = cur.to_int<std::size_t>(bh[3]);
    if (parametric != 0) {
      malformed(cur.name(), "parametric node blocks are not supported");
    }
    block.ids.reserve(n);
    block.coords.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
      block.ids.push_back(cur.to_int<std::int64_t>(cur.tokens(1)[0]));
    }
    for (std::size_t i = 0; i < n; ++i) {
      auto xyz = cur.tokens(3);
      block.coords.push_back(
          {cur.to_double(xyz[0]), cur.to_double(xyz[1]), cur.to_double(xyz[2])});
    }
    total += n;
    mesh.node_blocks.push_back(std::move(block));
  }
  cur.expect_exhausted();
  if (total != mesh.num_nodes) {
    malformed(cur.name(), "header declares " + std::to_string(mesh.num_nodes) +
                              " nodes, blocks hold " + std::to_string(total));
  }
}

void parse_elements(const std::vector<std::string_view>& body,
                    ParsedMesh& mesh) {
  SectionCursor cur("Elements", body);
  auto head = cur.tokens(4);
  const auto num_blocks = cur.to_int<std::size_t>(head[0]);
  mesh.num_elements = cur.to_int<std::size_t>(head[1]);

  std::size_t total = 0;
  for (std::size_t b = 0; b < num_blocks; ++b) {
    auto bh = cur.tokens(4);
    ElementBlock block;
    block.entity_dim = cur.to_int<int>(bh[0]);
    block.entity_tag = cur.to_int<int>(bh[1]);
    block.element_type = cur.to_int<int>(bh[2]);
    const auto n = cur.to_int<std::size_t>(bh[3]);
    const ElementTypeInfo info = element_type_info(block.element_type);
    if (info.dim != block.entity_dim) {
      malformed(cur.name(), "element type " +
                                std::to_string(block.element_type) +
                                " in a block of dimension " +
                                std::to_string(block.entity_dim));
    }
    block.nodes_per_element = info.num_nodes;
    block.ids.reserve(n);
    block.nodes.reserve(n * info.num_nodes);
    for (std::size_t e = 0; e < n; ++e) {
      auto tok = cur.tokens(static_cast<std::size_t>(info.num_nodes) + 1);
      block.ids.push_back(cur.to_int<std::int64_t>(tok[0]));
      for (int j = 0; j < info.num_nodes; ++j) {
        block.nodes.push_back(cur.to_int<std::int64_t>(tok[j + 1]));
      }
    }
    total += n;
    mesh.element_blocks.push_back(std::move(block));
  }
  cur.expect_exhausted();
  if (total != mesh.num_elements) {
    malformed(cur.name(), "header declares " +
                              std::to_string(mesh.num_elements) +
                              " elements, blocks hold " + std::to_string(total));
  }
}

}  // namespace

ElementTypeInfo element_type_info(int type_code) {
  switch (type_code) {
    case 15: return {0, 0, 1};
    case 1: return {1, 1, 2};
    case 8: return {1, 2, 3};
    case 26: return {1, 3, 4};
    case 27: return {1, 4, 5};
    case 2: return {2, 1, 3};
    case 9: return {2, 2, 6};
    case 21: return {2, 3, 10};
    case 23: return {2, 4, 15};
    case 4: return {3, 1, 4};
    case 11: return {3, 2, 10};
    case 29: return {3, 3, 20};
    case 30: return {3, 4, 35};
    default:
      throw Error(ErrorKind::UnsupportedElementType,
                  "element type " + std::to_string(type_code));
  }
}

int simplex_type_code(int dim, int order) {
  static constexpr std::array<int, 4> tri{2, 9, 21, 23};
  static constexpr std::array<int, 4> tet{4, 11, 29, 30};
  if (order < 1 || order > 4 || (dim != 2 && dim != 3)) {
    throw Error(ErrorKind::UnsupportedDegree,
                "no simplex of order " + std::to_string(order));
  }
  return dim == 2 ? tri[order - 1] : tet[order - 1];
}

ParsedMesh parse_msh(std::string_view text) {
  parse_mesh_format(text);
  const Sections sections = split_sections(text);

  ParsedMesh mesh;
  if (const auto* body = sections.find("PhysicalNames")) {
    mesh.groups = parse_physical_names(*body);
  }
  const auto* entities = sections.find("Entities");
  const auto* nodes = sections.find("Nodes");
  const auto* elements = sections.find("Elements");
  if (entities == nullptr) {
    throw Error(ErrorKind::MalformedSection, "missing $Entities section");
  }
  if (nodes == nullptr) {
    throw Error(ErrorKind::MalformedSection, "missing $Nodes section");
  }
  if (elements == nullptr) {
    throw Error(ErrorKind::MalformedSection, "missing $Elements section");
  }
  mesh.entities = parse_entities(*entities);
  parse_nodes(*nodes, mesh);
  parse_elements(*elements, mesh);
  return mesh;
}

Index NodeNumbering::dense_index(std::int64_t id) const {
  auto it = std::lower_bound(sorted_ids.begin(), sorted_ids.end(), id);
  if (it == sorted_ids.end() || *it != id) {
    throw Error(ErrorKind::MalformedSection,
                "element references unknown node " + std::to_string(id));
  }
  return static_cast<Index>(it - sorted_ids.begin());
}

NodeNumbering renumber_nodes(const ParsedMesh& parsed) {
  std::vector<std::pair<std::int64_t, Vec3>> all;
  all.reserve(parsed.num_nodes);
  for (const auto& block : parsed.node_blocks) {
    for (std::size_t i = 0; i < block.ids.size(); ++i) {
      all.emplace_back(block.ids[i], block.coords[i]);
    }
  }
  std::sort(all.begin(), all.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  NodeNumbering out;
  out.sorted_ids.reserve(all.size());
  out.coord.reserve(all.size());
  for (std::size_t i = 0; i < all.size(); ++i) {
    if (i > 0 && all[i].first == all[i - 1].first) {
      throw Error(ErrorKind::DuplicateNodeId,
                  "node id " + std::to_string(all[i].first) +
                      " appears more than once");
    }
    out.sorted_ids.push_back(all[i].first);
    out.coord.push_back(all[i].second);
  }
  return out;
}

}  // namespace msh

double Mesh::volume() const {
  double vol = 0.0;
  for (Index k = 0; k < n_tets(); ++k) {
    auto t = tet(k);
    const Vec3& x0 = coord[t[0]];
    vol += dot(coord[t[1]] - x0, cross(coord[t[2]] - x0, coord[t[3]] - x0));
  }
  return vol / 6.0;
}

Mesh extract_mesh(const msh::ParsedMesh& parsed, int degree) {
  if (degree < 1 || degree > 4) {
    throw Error(ErrorKind::UnsupportedDegree,
                "degree " + std::to_string(degree) + " (supported: 1..4)");
  }
  std::set<int> orders;
  bool has_tets = false;
  for (const auto& block : parsed.element_blocks) {
    if (block.entity_dim < 2) continue;
    orders.insert(msh::element_type_info(block.element_type).order);
    has_tets = has_tets || block.entity_dim == 3;
  }
  if (!has_tets) {
    throw Error(ErrorKind::MalformedSection, "$Elements: no tetrahedra");
  }
  if (orders.size() > 1) {
    throw Error(ErrorKind::MixedDegrees,
                "surface/volume elements of different orders in one mesh");
  }
  if (*orders.begin() != degree) {
    throw Error(ErrorKind::DegreeMismatch,
                "mesh elements have order " + std::to_string(*orders.begin()) +
                    ", requested degree " + std::to_string(degree));
  }

  msh::NodeNumbering numbering = msh::renumber_nodes(parsed);

  Mesh mesh;
  mesh.degree = degree;
  mesh.dofK = (degree + 1) * (degree + 2) * (degree + 3) / 6;
  mesh.dofA = (degree + 1) * (degree + 2) / 2;
  mesh.coord = std::move(numbering.coord);
  numbering.coord.clear();

  for (const auto& block : parsed.element_blocks) {
    if (block.entity_dim == 3) {
      for (std::int64_t id : block.nodes) {
        mesh.ttrh.push_back(numbering.dense_index(id));
      }
      mesh.domain.insert(mesh.domain.end(), block.size(), block.entity_tag);
    } else if (block.entity_dim == 2) {
      for (std::int64_t id : block.nodes) {
        mesh.trB.push_back(numbering.dense_index(id));
      }
      mesh.domBd.insert(mesh.domBd.end(), block.size(), block.entity_tag);
    }
  }

  std::set<std::array<Index, 3>> tet_faces;
  for (Index k = 0; k < mesh.n_tets(); ++k) {
    const auto t = mesh.tet(k);
    for (int skip = 0; skip < 4; ++skip) {
      std::array<Index, 3> f{};
      for (int v = 0, i = 0; v < 4; ++v) {
        if (v != skip) f[i++] = t[v];
      }
      std::sort(f.begin(), f.end());
      tet_faces.insert(f);
    }
  }
  for (Index k = 0; k < mesh.n_tris(); ++k) {
    const auto t = mesh.tri(k);
    std::array<Index, 3> f{t[0], t[1], t[2]};
    std::sort(f.begin(), f.end());
    if (!tet_faces.contains(f)) {
      throw Error(ErrorKind::MalformedSection,
                  "boundary triangle " + std::to_string(k + 1) +
                      " is not a face of any tetrahedron");
    }
  }

  mesh.groups = parsed.groups;
  for (const auto& grp : parsed.groups) {
    GroupEntities ge;
    ge.dim = grp.dim;
    for (const auto& ent : parsed.entities[grp.dim]) {
      if (std::find(ent.physical_tags.begin(), ent.physical_tags.end(),
                    grp.tag) != ent.physical_tags.end()) {
        ge.entity_tags.push_back(ent.tag);
      }
    }
    std::sort(ge.entity_tags.begin(), ge.entity_tags.end());
    mesh.group_index[grp.name] = std::move(ge);
  }
  return mesh;
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorKind::IoError, "cannot open '" + path.string() + "'");
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Mesh load_mesh(const std::filesystem::path& path, int degree) {
  const std::string text = read_text_file(path);
  return extract_mesh(msh::parse_msh(text), degree);
}

}  // namespace femtet
