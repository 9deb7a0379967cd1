#pragma once

// Reader for GMSH ASCII .msh files, format version 4.1.
//
// Parsing happens in two stages. parse_msh() materializes the file sections
// as-is (entity records, node blocks, element blocks). extract_mesh() then
// renumbers the (possibly sparse) node ids densely and gathers the
// tetrahedra and boundary triangles of one polynomial degree into flat
// connectivity tables.

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "femtet/types.hpp"

namespace femtet {

struct PhysicalGroup {
  int dim = 0;
  int tag = 0;
  std::string name;
};

/// Entity tags (of the group's own dimension) carrying one physical group.
struct GroupEntities {
  int dim = 0;
  std::vector<int> entity_tags;
};

namespace msh {

struct EntityRecord {
  int dim = 0;
  int tag = 0;
  Vec3 bbox_min{};
  Vec3 bbox_max{};  // equal to bbox_min for points
  std::vector<int> physical_tags;
  std::vector<int> bounding_entities;  // signed; sign = orientation reversal
};

struct NodeBlock {
  int entity_dim = 0;
  int entity_tag = 0;
  std::vector<std::int64_t> ids;
  std::vector<Vec3> coords;
};

struct ElementBlock {
  int entity_dim = 0;
  int entity_tag = 0;
  int element_type = 0;
  int nodes_per_element = 0;
  std::vector<std::int64_t> ids;
  std::vector<std::int64_t> nodes;  // row-major, nodes_per_element per row

  std::size_t size() const { return ids.size(); }
  std::span<const std::int64_t> row(std::size_t i) const {
    return {nodes.data() + i * nodes_per_element,
            static_cast<std::size_t>(nodes_per_element)};
  }
};

struct ParsedMesh {
  std::vector<PhysicalGroup> groups;
  std::array<std::vector<EntityRecord>, 4> entities;
  std::vector<NodeBlock> node_blocks;
  std::vector<ElementBlock> element_blocks;
  std::size_t num_nodes = 0;     // as declared in the $Nodes header
  std::size_t num_elements = 0;  // as declared in the $Elements header
};

struct ElementTypeInfo {
  int dim;
  int order;
  int num_nodes;
};

/// Returns the geometry of a supported GMSH element type code, or throws
/// UnsupportedElementType.
ElementTypeInfo element_type_info(int type_code);

/// GMSH type code of the order-m tetrahedron (dim 3) or triangle (dim 2).
int simplex_type_code(int dim, int order);

ParsedMesh parse_msh(std::string_view text);

/// Dense renumbering of node ids, ascending in original id.
struct NodeNumbering {
  std::vector<std::int64_t> sorted_ids;  // position k holds the id mapped to k
  std::vector<Vec3> coord;

  /// 0-based dense index of an original node id; throws MalformedSection
  /// for ids absent from the $Nodes section.
  Index dense_index(std::int64_t id) const;
  std::size_t size() const { return sorted_ids.size(); }
};

NodeNumbering renumber_nodes(const ParsedMesh& parsed);

}  // namespace msh

/// Tetrahedral mesh of one polynomial degree, nodes densely numbered.
///
/// Connectivity is stored 0-based; user-facing output (files, diagnostics)
/// adds one to match the 1-based numbering of the mesh file conventions.
struct Mesh {
  int degree = 1;
  int dofK = 4;
  int dofA = 3;
  std::vector<Vec3> coord;
  std::vector<Index> ttrh;  // n_tets() x dofK, row-major
  std::vector<Index> trB;   // n_tris() x dofA, row-major
  std::vector<int> domain;  // 3D entity tag per tetrahedron
  std::vector<int> domBd;   // 2D entity tag per boundary triangle
  std::vector<PhysicalGroup> groups;
  std::map<std::string, GroupEntities> group_index;

  Index n_nodes() const { return static_cast<Index>(coord.size()); }
  Index n_tets() const { return static_cast<Index>(domain.size()); }
  Index n_tris() const { return static_cast<Index>(domBd.size()); }

  std::span<const Index> tet(Index k) const {
    return {ttrh.data() + static_cast<std::size_t>(k) * dofK,
            static_cast<std::size_t>(dofK)};
  }
  std::span<const Index> tri(Index k) const {
    return {trB.data() + static_cast<std::size_t>(k) * dofA,
            static_cast<std::size_t>(dofA)};
  }

  /// Total volume from the vertex coordinates of every tetrahedron.
  double volume() const;
};

Mesh extract_mesh(const msh::ParsedMesh& parsed, int degree);

/// Reads and parses a file, then extracts the mesh. IoError if unreadable.
Mesh load_mesh(const std::filesystem::path& path, int degree);

std::string read_text_file(const std::filesystem::path& path);

}  // namespace femtet
