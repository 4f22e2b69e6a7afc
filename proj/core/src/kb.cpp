#include "scpatcher/kb.hpp"

#include <algorithm>
#include <bit>
#include <fstream>
#include <sstream>

#include "scpatcher/digest.hpp"
#include "scpatcher/ingest.hpp"

namespace scpatcher::kg {

namespace fs = std::filesystem;

namespace {

enum class Section : std::uint8_t { Nodes = 1, Edges = 2, Clones = 3, Embedder = 4, Vectors = 5, Sources = 6 };

class Writer {
 public:
  void u8(std::uint8_t v) { buf_.push_back(static_cast<char>(v)); }
  void u16(std::uint16_t v) { le(v, 2); }
  void u32(std::uint32_t v) { le(v, 4); }
  void u64(std::uint64_t v) { le(v, 8); }
  void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
  void str(std::string_view s) {
    u32(static_cast<std::uint32_t>(s.size()));
    buf_.append(s);
  }
  void raw(std::string_view s) { buf_.append(s); }
  std::string& bytes() { return buf_; }

 private:
  void le(std::uint64_t v, int n) {
    for (int i = 0; i < n; ++i) buf_.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
  }
  std::string buf_;
};

class Reader {
 public:
  explicit Reader(std::string_view data) : data_(data) {}

  std::uint8_t u8() { return static_cast<std::uint8_t>(le(1)); }
  std::uint16_t u16() { return static_cast<std::uint16_t>(le(2)); }
  std::uint32_t u32() { return static_cast<std::uint32_t>(le(4)); }
  std::uint64_t u64() { return le(8); }
  double f64() { return std::bit_cast<double>(u64()); }
  std::string str() {
    const std::uint32_t n = u32();
    return std::string(take(n));
  }
  std::string_view take(std::size_t n) {
    if (data_.size() - pos_ < n) throw FormatError(FormatErrorKind::Truncated, "Truncated: knowledge base file ends early");
    const std::string_view out = data_.substr(pos_, n);
    pos_ += n;
    return out;
  }
  bool done() const { return pos_ == data_.size(); }

 private:
  std::uint64_t le(int n) {
    const std::string_view b = take(static_cast<std::size_t>(n));
    std::uint64_t v = 0;
    for (int i = n - 1; i >= 0; --i) v = (v << 8) | static_cast<unsigned char>(b[static_cast<std::size_t>(i)]);
    return v;
  }
  std::string_view data_;
  std::size_t pos_ = 0;
};

void write_section(Writer& out, Section tag, Writer& body) {
  out.u8(static_cast<std::uint8_t>(tag));
  out.u64(body.bytes().size());
  out.raw(body.bytes());
}

Reader open_section(Reader& in, Section expected) {
  const auto tag = in.u8();
  if (tag != static_cast<std::uint8_t>(expected)) {
    throw FormatError(FormatErrorKind::Corrupt, "Corrupt: expected section " +
                                                    std::to_string(static_cast<int>(expected)) + ", found " +
                                                    std::to_string(tag));
  }
  const std::uint64_t len = in.u64();
  return Reader(in.take(static_cast<std::size_t>(len)));
}

void finish_section(const Reader& r) {
  if (!r.done()) throw FormatError(FormatErrorKind::Corrupt, "Corrupt: trailing bytes in section");
}

template <class Enum>
Enum checked_enum(std::uint8_t v, std::uint8_t max, const char* what) {
  if (v > max) throw FormatError(FormatErrorKind::Corrupt, std::string("Corrupt: bad ") + what + " tag");
  return static_cast<Enum>(v);
}

void write_unit(Writer& w, const FunctionUnit& f) {
  w.str(f.id);
  w.str(f.contract_name);
  w.str(f.name);
  w.str(f.source_text);
  w.u32(static_cast<std::uint32_t>(f.signature.features.size()));
  for (const auto& s : f.signature.features) w.str(s);
  w.u32(f.token_count);
  w.u8(f.clone_id ? 1 : 0);
  if (f.clone_id) w.str(*f.clone_id);
  w.u64(f.guf);
  w.u32(f.start_line);
}

FunctionUnit read_unit(Reader& r) {
  FunctionUnit f;
  f.id = r.str();
  f.contract_name = r.str();
  f.name = r.str();
  f.source_text = r.str();
  const std::uint32_t nf = r.u32();
  for (std::uint32_t i = 0; i < nf; ++i) f.signature.features.insert(r.str());
  f.token_count = r.u32();
  if (r.u8()) f.clone_id = r.str();
  f.guf = r.u64();
  f.start_line = r.u32();
  return f;
}

}  // namespace

embed::VectorIndex KnowledgeBase::make_index() const {
  std::vector<embed::IndexEntry> entries;
  entries.reserve(vectors.size());
  for (const auto& [id, vec] : vectors) {
    const FunctionUnit* f = graph.function(id);
    if (!f) continue;
    entries.push_back(embed::IndexEntry{id, vec, std::max<std::uint64_t>(f->guf, 1), f->clone_id, f->signature});
  }
  return embed::VectorIndex(std::move(entries));
}

std::string canonical_source_hash(std::string_view text) {
  return sha256_hex(ingest::canonical_source_form(text));
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("IoError: cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoError("IoError: read failure on " + path.string());
  return ss.str();
}

KnowledgeBase build_knowledge_base(const fs::path& corpus_dir, const embed::EmbeddingProvider& provider,
                                   std::uint32_t clone_min_tokens, BuildReport* report) {
  BuildReport local;
  BuildReport& rep = report ? *report : local;
  if (!fs::is_directory(corpus_dir)) throw IoError("IoError: corpus directory not found: " + corpus_dir.string());

  std::vector<fs::path> files;
  for (const auto& entry : fs::recursive_directory_iterator(corpus_dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".sol") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());

  KnowledgeBase kb;
  kb.embedder = EmbedderInfo{provider.name(), static_cast<std::uint32_t>(provider.dimension())};
  std::vector<Triple> triples;
  std::vector<FunctionUnit> functions;
  for (const auto& file : files) {
    const std::string rel = fs::relative(file, corpus_dir).generic_string();
    std::string text = read_file(file);
    kb.sources.push_back(SourceRecord{rel, canonical_source_hash(text)});
    try {
      const ingest::SourceUnit unit = ingest::parse_source(std::move(text), rel);
      for (const auto& d : unit.diagnostics) rep.diagnostics.push_back(rel + ": " + d);
      auto extracted = ingest::extract_triples(unit);
      for (auto& d : extracted.diagnostics) rep.diagnostics.push_back(std::move(d));
      triples.insert(triples.end(), extracted.triples.begin(), extracted.triples.end());
      for (const auto& c : unit.contracts) {
        for (const auto& f : c.functions) functions.push_back(f.unit);
      }
      ++rep.files;
    } catch (const ingest::IngestError& e) {
      rep.diagnostics.push_back(rel + ": skipped: " + e.what());
    }
  }
  std::sort(kb.sources.begin(), kb.sources.end(), [](const auto& a, const auto& b) { return a.path < b.path; });

  kb.graph = build_graph(triples, functions);
  kb.clones = assign_clone_groups(kb.graph, clone_min_tokens);
  kb.graph = compute_guf(std::move(kb.graph), kb.clones);

  const auto ids = kb.graph.function_ids();
  rep.functions = ids.size();
  constexpr std::size_t kBatch = 64;
  for (std::size_t b = 0; b < ids.size(); b += kBatch) {
    std::vector<std::string> texts;
    const std::size_t e = std::min(ids.size(), b + kBatch);
    for (std::size_t i = b; i < e; ++i) texts.push_back(kb.graph.function(ids[i])->source_text);
    auto vecs = provider.embed_batch(texts);
    for (std::size_t i = b; i < e; ++i) kb.vectors.emplace(ids[i], std::move(vecs[i - b]));
  }
  return kb;
}

std::string serialize_kb(const KnowledgeBase& kb) {
  Writer out;
  out.raw("SCPK");
  out.u16(kKbFormatVersion);

  Writer nodes;
  nodes.u32(static_cast<std::uint32_t>(kb.graph.nodes().size()));
  for (const auto& [id, n] : kb.graph.nodes()) {
    nodes.str(id);
    nodes.u8(static_cast<std::uint8_t>(n.kind));
    nodes.u8(n.payload ? 1 : 0);
    if (n.payload) write_unit(nodes, *n.payload);
  }
  write_section(out, Section::Nodes, nodes);

  Writer edges;
  edges.u32(static_cast<std::uint32_t>(kb.graph.edges().size()));
  for (const auto& t : kb.graph.edges()) {
    edges.str(t.subject.id);
    edges.u8(static_cast<std::uint8_t>(t.subject.kind));
    edges.u8(static_cast<std::uint8_t>(t.relation));
    edges.str(t.object.id);
    edges.u8(static_cast<std::uint8_t>(t.object.kind));
  }
  write_section(out, Section::Edges, edges);

  Writer clones;
  clones.u32(kb.clones.clone_min_tokens);
  clones.u32(static_cast<std::uint32_t>(kb.clones.groups.size()));
  for (const auto& [cid, members] : kb.clones.groups) {
    clones.str(cid);
    clones.u32(static_cast<std::uint32_t>(members.size()));
    for (const auto& m : members) clones.str(m);
  }
  write_section(out, Section::Clones, clones);

  Writer emb;
  emb.str(kb.embedder.name);
  emb.u32(kb.embedder.dimension);
  write_section(out, Section::Embedder, emb);

  Writer vecs;
  vecs.u32(static_cast<std::uint32_t>(kb.vectors.size()));
  for (const auto& [id, v] : kb.vectors) {
    vecs.str(id);
    vecs.u32(static_cast<std::uint32_t>(v.dimension()));
    for (double x : v.values) vecs.f64(x);
  }
  write_section(out, Section::Vectors, vecs);

  Writer srcs;
  srcs.u32(static_cast<std::uint32_t>(kb.sources.size()));
  for (const auto& s : kb.sources) {
    srcs.str(s.path);
    srcs.str(s.canonical_hash);
  }
  write_section(out, Section::Sources, srcs);
  return std::move(out.bytes());
}

KnowledgeBase deserialize_kb(std::string_view bytes) {
  if (bytes.size() < 4 || bytes.substr(0, 4) != "SCPK") {
    throw FormatError(FormatErrorKind::BadMagic, "BadMagic: not a knowledge base file");
  }
  Reader in(bytes.substr(4));
  const std::uint16_t version = in.u16();
  if (version != kKbFormatVersion) {
    throw FormatError(FormatErrorKind::VersionMismatch, "VersionMismatch: file version " + std::to_string(version) +
                                                            ", supported " + std::to_string(kKbFormatVersion));
  }
  KnowledgeBase kb;
  try {
    Reader nodes = open_section(in, Section::Nodes);
    const std::uint32_t nn = nodes.u32();
    for (std::uint32_t i = 0; i < nn; ++i) {
      std::string id = nodes.str();
      EntityNode node;
      node.kind = checked_enum<NodeKind>(nodes.u8(), static_cast<std::uint8_t>(NodeKind::TypeName), "node kind");
      if (nodes.u8()) node.payload = read_unit(nodes);
      kb.graph.add_node(id, std::move(node));
    }
    finish_section(nodes);

    Reader edges = open_section(in, Section::Edges);
    const std::uint32_t ne = edges.u32();
    std::vector<Triple> triples;
    triples.reserve(ne);
    for (std::uint32_t i = 0; i < ne; ++i) {
      Triple t;
      t.subject.id = edges.str();
      t.subject.kind = checked_enum<NodeKind>(edges.u8(), static_cast<std::uint8_t>(NodeKind::TypeName), "node kind");
      t.relation = checked_enum<Relation>(edges.u8(), static_cast<std::uint8_t>(Relation::Writes), "relation");
      t.object.id = edges.str();
      t.object.kind = checked_enum<NodeKind>(edges.u8(), static_cast<std::uint8_t>(NodeKind::TypeName), "node kind");
      triples.push_back(std::move(t));
    }
    finish_section(edges);
    kb.graph.add_edges(triples);

    Reader clones = open_section(in, Section::Clones);
    kb.clones.clone_min_tokens = clones.u32();
    const std::uint32_t ng = clones.u32();
    for (std::uint32_t i = 0; i < ng; ++i) {
      std::string cid = clones.str();
      const std::uint32_t nm = clones.u32();
      std::vector<std::string> members;
      for (std::uint32_t k = 0; k < nm; ++k) members.push_back(clones.str());
      kb.clones.groups.emplace(std::move(cid), std::move(members));
    }
    finish_section(clones);

    Reader emb = open_section(in, Section::Embedder);
    kb.embedder.name = emb.str();
    kb.embedder.dimension = emb.u32();
    finish_section(emb);

    Reader vecs = open_section(in, Section::Vectors);
    const std::uint32_t nv = vecs.u32();
    for (std::uint32_t i = 0; i < nv; ++i) {
      std::string id = vecs.str();
      const std::uint32_t dim = vecs.u32();
      if (dim != kb.embedder.dimension) {
        throw FormatError(FormatErrorKind::Corrupt, "Corrupt: vector dimension disagrees with embedder metadata");
      }
      embed::EmbeddingVector v;
      v.values.reserve(dim);
      for (std::uint32_t k = 0; k < dim; ++k) v.values.push_back(vecs.f64());
      kb.vectors.emplace(std::move(id), std::move(v));
    }
    finish_section(vecs);

    Reader srcs = open_section(in, Section::Sources);
    const std::uint32_t ns = srcs.u32();
    for (std::uint32_t i = 0; i < ns; ++i) {
      SourceRecord s;
      s.path = srcs.str();
      s.canonical_hash = srcs.str();
      kb.sources.push_back(std::move(s));
    }
    finish_section(srcs);
  } catch (const GraphError& e) {
    throw FormatError(FormatErrorKind::Corrupt, std::string("Corrupt: ") + e.what());
  }
  if (!in.done()) throw FormatError(FormatErrorKind::Corrupt, "Corrupt: trailing bytes after last section");
  return kb;
}

void save_kb(const KnowledgeBase& kb, const fs::path& path) {
  const std::string bytes = serialize_kb(kb);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("IoError: cannot write " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("IoError: write failure on " + path.string());
}

KnowledgeBase load_kb(const fs::path& path) { return deserialize_kb(read_file(path)); }

}  // namespace scpatcher::kg
