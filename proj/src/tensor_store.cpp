#include "oscme/tensor_store.hpp"

#include "oscme/recurrence.hpp"
#include "oscme/version.hpp"

#include <json.hpp>
#include <openssl/evp.h>

#include <algorithm>
#include <bit>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <thread>

namespace oscme::tensor {

namespace {

constexpr char kMagic[4] = {'O', 'S', 'C', 'V'};
constexpr std::uint16_t kFormatVersion = 1;
constexpr int kMaxCutoffValue = 200; // indices must fit the 1-byte record slot

void append_u16(std::vector<std::uint8_t> &out, std::uint16_t v) {
  out.push_back(static_cast<std::uint8_t>(v & 0xff));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
}

void append_u32(std::vector<std::uint8_t> &out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i)
    out.push_back(static_cast<std::uint8_t>((v >> (8 * i)) & 0xff));
}

void append_u64(std::vector<std::uint8_t> &out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i)
    out.push_back(static_cast<std::uint8_t>((v >> (8 * i)) & 0xff));
}

void append_f64(std::vector<std::uint8_t> &out, double v) {
  append_u64(out, std::bit_cast<std::uint64_t>(v));
}

struct Reader {
  const std::uint8_t *p;
  std::size_t left;

  void need(std::size_t n) const {
    if (left < n)
      throw FormatError("tensor file truncated");
  }
  std::uint8_t u8() {
    need(1);
    --left;
    return *p++;
  }
  std::uint16_t u16() {
    need(2);
    std::uint16_t v = static_cast<std::uint16_t>(p[0] | (p[1] << 8));
    p += 2;
    left -= 2;
    return v;
  }
  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i)
      v |= static_cast<std::uint32_t>(p[i]) << (8 * i);
    p += 4;
    left -= 4;
    return v;
  }
  std::uint64_t u64() {
    need(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i)
      v |= static_cast<std::uint64_t>(p[i]) << (8 * i);
    p += 8;
    left -= 8;
    return v;
  }
  double f64() { return std::bit_cast<double>(u64()); }
};

std::array<std::uint8_t, 32> sha256(const std::uint8_t *data, std::size_t n) {
  std::array<std::uint8_t, 32> out{};
  EVP_MD_CTX *ctx = EVP_MD_CTX_new();
  if (!ctx)
    throw std::runtime_error("sha256: EVP context allocation failed");
  unsigned int len = 0;
  if (EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr) != 1 ||
      EVP_DigestUpdate(ctx, data, n) != 1 ||
      EVP_DigestFinal_ex(ctx, out.data(), &len) != 1 || len != out.size()) {
    EVP_MD_CTX_free(ctx);
    throw std::runtime_error("sha256: digest computation failed");
  }
  EVP_MD_CTX_free(ctx);
  return out;
}

std::string hex(const std::array<std::uint8_t, 32> &d) {
  static const char *k = "0123456789abcdef";
  std::string s;
  s.reserve(64);
  for (auto b : d) {
    s.push_back(k[b >> 4]);
    s.push_back(k[b & 0xf]);
  }
  return s;
}

std::array<std::uint8_t, 32> unhex(const std::string &s) {
  if (s.size() != 64)
    throw FormatError("digest field must be 64 hex characters");
  auto nib = [](char c) -> int {
    if (c >= '0' && c <= '9')
      return c - '0';
    if (c >= 'a' && c <= 'f')
      return c - 'a' + 10;
    if (c >= 'A' && c <= 'F')
      return c - 'A' + 10;
    throw FormatError("digest field contains a non-hex character");
  };
  std::array<std::uint8_t, 32> out{};
  for (std::size_t i = 0; i < 32; ++i)
    out[i] = static_cast<std::uint8_t>((nib(s[2 * i]) << 4) | nib(s[2 * i + 1]));
  return out;
}

std::string format_value(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.16e", v);
  return buf;
}

std::string mode_name(CutoffMode m) {
  return m == CutoffMode::PerAxis ? "per_axis" : "total_quanta";
}

CutoffMode mode_from_name(const std::string &s) {
  if (s == "per_axis")
    return CutoffMode::PerAxis;
  if (s == "total_quanta")
    return CutoffMode::TotalQuanta;
  throw FormatError("unknown cutoff mode '" + s + "'");
}

void check_header_fields(const BasisCutoff &cutoff, double a) {
  if (cutoff.value < 0 || cutoff.value > kMaxCutoffValue)
    throw FormatError("cutoff value out of range");
  if (!(a > 0.0) || !std::isfinite(a))
    throw FormatError("scale must be finite and > 0");
}

std::uint64_t fnv1a(const std::array<int, 12> &flat) {
  std::uint64_t h = 1469598103934665603ull;
  for (int v : flat) {
    h ^= static_cast<std::uint64_t>(static_cast<std::uint8_t>(v));
    h *= 1099511628211ull;
  }
  return h;
}

} // namespace

bool BasisCutoff::contains(const QuantumTriple &t) const {
  if (t.nx < 0 || t.ny < 0 || t.nz < 0)
    return false;
  if (mode == CutoffMode::PerAxis)
    return t.nx <= value && t.ny <= value && t.nz <= value;
  return t.total() <= value;
}

bool BasisCutoff::contains(const ElementKey &k) const {
  return contains(k[0]) && contains(k[1]) && contains(k[2]) && contains(k[3]);
}

std::vector<QuantumTriple> BasisCutoff::states() const {
  if (value < 0)
    throw std::invalid_argument("BasisCutoff: value must be >= 0");
  std::vector<QuantumTriple> out;
  for (int nx = 0; nx <= value; ++nx)
    for (int ny = 0; ny <= value; ++ny)
      for (int nz = 0; nz <= value; ++nz) {
        const QuantumTriple t{nx, ny, nz};
        if (contains(t))
          out.push_back(t);
      }
  return out;
}

std::size_t BasisCutoff::state_count() const { return states().size(); }

std::string BasisCutoff::str() const {
  return mode_name(mode) + "<=" + std::to_string(value);
}

std::size_t estimate_keys(const BasisCutoff &cutoff) {
  const long double n = static_cast<long double>(cutoff.state_count());
  const long double total = n * n * n * n;
  if (total > static_cast<long double>(SIZE_MAX))
    return SIZE_MAX;
  return static_cast<std::size_t>(total);
}

TensorStore::TensorStore(const BasisCutoff &cutoff, double a, Backend backend)
    : cutoff_(cutoff), a_(a), backend_(backend), code_version_(kVersion) {
  if (cutoff.value < 0)
    throw std::invalid_argument("TensorStore: cutoff value must be >= 0");
  if (cutoff.value > kMaxCutoffValue)
    throw std::invalid_argument("TensorStore: cutoff value exceeds " +
                                std::to_string(kMaxCutoffValue));
  if (!(a > 0.0) || !std::isfinite(a))
    throw std::invalid_argument("TensorStore: scale must be finite and > 0");
}

double TensorStore::lookup(const ElementKey &key) const {
  if (!cutoff_.contains(key))
    throw OutOfCutoffError("lookup: key " + key.str() + " outside cutoff " +
                           cutoff_.str());
  const auto it = elements_.find(canonical_key(key).key);
  return it == elements_.end() ? 0.0 : it->second;
}

void TensorStore::insert(const ElementKey &canonical, double value) {
  if (!cutoff_.contains(canonical))
    throw std::invalid_argument("insert: key outside cutoff");
  if (canonical_key(canonical).key != canonical)
    throw std::invalid_argument("insert: key is not canonical");
  if (value == 0.0 || !std::isfinite(value))
    throw std::invalid_argument("insert: value must be nonzero and finite");
  if (!elements_.emplace(canonical, value).second)
    throw std::invalid_argument("insert: duplicate key");
}

std::vector<std::uint8_t> TensorStore::serialize_binary() const {
  std::vector<std::uint8_t> out;
  out.reserve(32 + elements_.size() * 20);
  out.insert(out.end(), kMagic, kMagic + 4);
  append_u16(out, kFormatVersion);
  out.push_back(static_cast<std::uint8_t>(cutoff_.mode));
  append_u32(out, static_cast<std::uint32_t>(cutoff_.value));
  append_f64(out, a_);
  out.push_back(backend_ == Backend::Float ? 0 : 1);
  append_u64(out, elements_.size());
  for (const auto &[key, value] : elements_) {
    for (int v : key.flat())
      out.push_back(static_cast<std::uint8_t>(v));
    append_f64(out, value);
  }
  const auto d = sha256(out.data(), out.size());
  out.insert(out.end(), d.begin(), d.end());
  return out;
}

std::array<std::uint8_t, 32> TensorStore::digest() const {
  const auto bytes = serialize_binary();
  std::array<std::uint8_t, 32> d{};
  std::copy(bytes.end() - 32, bytes.end(), d.begin());
  return d;
}

TensorStore TensorStore::parse_binary(const std::vector<std::uint8_t> &bytes) {
  if (bytes.size() < 4 + 2 + 1 + 4 + 8 + 1 + 8 + 32)
    throw FormatError("tensor file too short");
  if (std::memcmp(bytes.data(), kMagic, 4) != 0)
    throw FormatError("bad magic (not a tensor file)");
  // Digest covers everything before the trailing 32 bytes.
  const auto expect = sha256(bytes.data(), bytes.size() - 32);
  if (std::memcmp(expect.data(), bytes.data() + bytes.size() - 32, 32) != 0)
    throw DigestError("tensor file digest mismatch (corrupted content)");

  Reader r{bytes.data() + 4, bytes.size() - 4 - 32};
  const std::uint16_t version = r.u16();
  if (version != kFormatVersion)
    throw FormatError("unsupported tensor format version " +
                      std::to_string(version));
  const std::uint8_t mode = r.u8();
  if (mode > 1)
    throw FormatError("bad cutoff mode byte");
  BasisCutoff cutoff{static_cast<CutoffMode>(mode),
                     static_cast<int>(r.u32())};
  const double a = r.f64();
  check_header_fields(cutoff, a);
  const std::uint8_t backend = r.u8();
  if (backend > 1)
    throw FormatError("bad backend byte");
  const std::uint64_t count = r.u64();
  if (count > r.left / 20 || r.left != count * 20)
    throw FormatError("record section size mismatch");

  TensorStore store(cutoff, a,
                    backend == 0 ? Backend::Float : Backend::Exact);
  ElementKey prev;
  for (std::uint64_t i = 0; i < count; ++i) {
    std::array<int, 12> flat{};
    for (auto &v : flat)
      v = r.u8();
    const ElementKey key = ElementKey::from_flat(flat);
    if (i > 0 && !(prev < key))
      throw FormatError("records out of order");
    prev = key;
    const double value = r.f64();
    if (!cutoff.contains(key))
      throw FormatError("record key outside cutoff");
    if (canonical_key(key).key != key)
      throw FormatError("record key is not canonical");
    if (value == 0.0 || !std::isfinite(value))
      throw FormatError("record value must be nonzero and finite");
    store.elements_.emplace_hint(store.elements_.end(), key, value);
  }
  return store;
}

std::string TensorStore::serialize_json() const {
  nlohmann::json j;
  j["format"] = "OSCV";
  j["version"] = kFormatVersion;
  j["cutoff_mode"] = mode_name(cutoff_.mode);
  j["cutoff"] = cutoff_.value;
  j["scale"] = a_;
  j["backend"] = backend_name(backend_);
  j["code_version"] = code_version_;
  j["count"] = elements_.size();
  j["digest"] = hex(digest());
  auto &arr = j["elements"] = nlohmann::json::array();
  for (const auto &[key, value] : elements_) {
    nlohmann::json e;
    e["key"] = key.flat();
    e["value"] = format_value(value); // decimal string, 17 significant digits
    arr.push_back(std::move(e));
  }
  return j.dump(2) + "\n";
}

TensorStore TensorStore::parse_json(const std::string &text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception &e) {
    throw FormatError(std::string("invalid JSON: ") + e.what());
  }
  try {
    if (j.at("format").get<std::string>() != "OSCV")
      throw FormatError("format field is not OSCV");
    if (j.at("version").get<int>() != kFormatVersion)
      throw FormatError("unsupported version");
    BasisCutoff cutoff{mode_from_name(j.at("cutoff_mode").get<std::string>()),
                       j.at("cutoff").get<int>()};
    const double a = j.at("scale").get<double>();
    check_header_fields(cutoff, a);
    TensorStore store(cutoff, a,
                      backend_from_name(j.at("backend").get<std::string>()));
    const auto claimed = unhex(j.at("digest").get<std::string>());
    for (const auto &e : j.at("elements")) {
      const auto flat_vec = e.at("key").get<std::vector<int>>();
      if (flat_vec.size() != 12)
        throw FormatError("element key must have 12 entries");
      std::array<int, 12> flat{};
      std::copy(flat_vec.begin(), flat_vec.end(), flat.begin());
      const std::string vs = e.at("value").get<std::string>();
      std::size_t pos = 0;
      const double value = std::stod(vs, &pos);
      if (pos != vs.size())
        throw FormatError("malformed element value '" + vs + "'");
      store.insert(ElementKey::from_flat(flat), value);
    }
    if (store.count() != j.at("count").get<std::size_t>())
      throw FormatError("element count does not match header");
    if (store.digest() != claimed)
      throw DigestError("tensor digest mismatch (corrupted content)");
    return store;
  } catch (const nlohmann::json::exception &e) {
    throw FormatError(std::string("invalid tensor JSON: ") + e.what());
  } catch (const std::invalid_argument &e) {
    throw FormatError(std::string("invalid tensor JSON: ") + e.what());
  } catch (const std::out_of_range &e) {
    throw FormatError(std::string("invalid tensor JSON: ") + e.what());
  }
}

std::string TensorStore::serialize_csv() const {
  std::ostringstream os;
  os << "# OSCV version=" << kFormatVersion << " mode=" << mode_name(cutoff_.mode)
     << " cutoff=" << cutoff_.value << " scale=" << format_value(a_)
     << " backend=" << backend_name(backend_) << " count=" << elements_.size()
     << " digest=" << hex(digest()) << "\n";
  os << "nx1,ny1,nz1,nx2,ny2,nz2,nx3,ny3,nz3,nx4,ny4,nz4,value\n";
  for (const auto &[key, value] : elements_) {
    const auto flat = key.flat();
    for (int v : flat)
      os << v << ',';
    os << format_value(value) << "\n";
  }
  return os.str();
}

TensorStore TensorStore::parse_csv(const std::string &text) {
  std::istringstream is(text);
  std::string line;
  if (!std::getline(is, line) || line.rfind("# OSCV", 0) != 0)
    throw FormatError("missing CSV header comment");
  // Parse "key=value" tokens from the comment line.
  std::map<std::string, std::string> fields;
  {
    std::istringstream ls(line.substr(1));
    std::string tok;
    while (ls >> tok) {
      const auto eq = tok.find('=');
      if (eq != std::string::npos)
        fields[tok.substr(0, eq)] = tok.substr(eq + 1);
    }
  }
  auto field = [&](const char *name) -> const std::string & {
    const auto it = fields.find(name);
    if (it == fields.end())
      throw FormatError(std::string("CSV header missing field ") + name);
    return it->second;
  };
  if (std::stoi(field("version")) != kFormatVersion)
    throw FormatError("unsupported version");
  BasisCutoff cutoff{mode_from_name(field("mode")), std::stoi(field("cutoff"))};
  const double a = std::stod(field("scale"));
  check_header_fields(cutoff, a);
  TensorStore store(cutoff, a, backend_from_name(field("backend")));
  const auto claimed = unhex(field("digest"));
  const std::size_t count = std::stoul(field("count"));

  if (!std::getline(is, line) || line.rfind("nx1,", 0) != 0)
    throw FormatError("missing CSV column header");
  while (std::getline(is, line)) {
    if (line.empty())
      continue;
    std::istringstream ls(line);
    std::array<int, 12> flat{};
    std::string cell;
    for (auto &v : flat) {
      if (!std::getline(ls, cell, ','))
        throw FormatError("short CSV row");
      v = std::stoi(cell);
    }
    if (!std::getline(ls, cell))
      throw FormatError("CSV row missing value");
    std::size_t pos = 0;
    const double value = std::stod(cell, &pos);
    if (pos != cell.size())
      throw FormatError("malformed CSV value '" + cell + "'");
    store.insert(ElementKey::from_flat(flat), value);
  }
  if (store.count() != count)
    throw FormatError("element count does not match header");
  if (store.digest() != claimed)
    throw DigestError("tensor digest mismatch (corrupted content)");
  return store;
}

Format TensorStore::format_for_path(const std::filesystem::path &path) {
  const std::string ext = path.extension().string();
  if (ext == ".json")
    return Format::Json;
  if (ext == ".csv")
    return Format::Csv;
  if (ext == ".oscv" || ext == ".bin")
    return Format::Binary;
  throw std::invalid_argument("cannot infer tensor format from extension '" +
                              ext + "' (use .oscv, .bin, .json or .csv)");
}

void TensorStore::export_file(const std::filesystem::path &path,
                              Format fmt) const {
  std::ofstream os(path, std::ios::binary);
  if (!os)
    throw std::runtime_error("cannot open " + path.string() + " for writing");
  switch (fmt) {
  case Format::Binary: {
    const auto bytes = serialize_binary();
    os.write(reinterpret_cast<const char *>(bytes.data()),
             static_cast<std::streamsize>(bytes.size()));
    break;
  }
  case Format::Json:
    os << serialize_json();
    break;
  case Format::Csv:
    os << serialize_csv();
    break;
  }
  if (!os.good())
    throw std::runtime_error("write to " + path.string() + " failed");
}

TensorStore TensorStore::import_file(const std::filesystem::path &path) {
  std::ifstream is(path, std::ios::binary);
  if (!is)
    throw std::runtime_error("cannot open " + path.string() + " for reading");
  std::ostringstream buf;
  buf << is.rdbuf();
  const std::string content = buf.str();
  if (content.size() >= 4 && std::memcmp(content.data(), kMagic, 4) == 0) {
    std::vector<std::uint8_t> bytes(content.begin(), content.end());
    return parse_binary(bytes);
  }
  // Sniff text formats by their first byte.
  const std::size_t first = content.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && content[first] == '{')
    return parse_json(content);
  if (first != std::string::npos && content[first] == '#')
    return parse_csv(content);
  throw FormatError("unrecognized tensor file " + path.string());
}

TensorStore build_tensor(const BasisCutoff &cutoff, double a,
                         const BuildOptions &options) {
  if (options.workers < 1)
    throw std::invalid_argument("build_tensor: workers must be >= 1");
  const std::size_t estimated = estimate_keys(cutoff);
  if (estimated > options.max_keys)
    throw MemoryLimitError(
        estimated, "build_tensor: estimated " + std::to_string(estimated) +
                       " candidate keys exceeds the limit of " +
                       std::to_string(options.max_keys) +
                       " (raise max_keys to proceed)");

  const std::vector<QuantumTriple> states = cutoff.states();
  // Both modes bound every single index by cutoff.value; recurrence families
  // seed up to twice the largest pair index.
  const int max_index = cutoff.value;
  const Evaluator eval(2 * max_index, OscillatorScale(a));

  TensorStore store(cutoff, a, options.backend);
  const int nw = options.workers;
  std::vector<std::vector<std::pair<ElementKey, double>>> produced(
      static_cast<std::size_t>(nw));
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(nw));

  auto worker = [&](int w) {
    try {
      auto &out = produced[static_cast<std::size_t>(w)];
      // Per-worker cache of recurrence family tables, keyed by the family's
      // context (the ten fixed quantum numbers).
      std::map<ElementKey, recurrence::FamilyTable> families;
      const std::size_t n = states.size();
      for (std::size_t i1 = 0; i1 < n; ++i1)
        for (std::size_t i2 = 0; i2 < n; ++i2)
          for (std::size_t i3 = 0; i3 < n; ++i3)
            for (std::size_t i4 = 0; i4 < n; ++i4) {
              ElementKey key;
              key.orbital = {states[i1], states[i2], states[i3], states[i4]};
              if (canonical_key(key).key != key)
                continue; // another image of the orbit owns this value
              if (nw > 1 &&
                  fnv1a(key.flat()) % static_cast<std::uint64_t>(nw) !=
                      static_cast<std::uint64_t>(w))
                continue;
              if (!selection_rule(key).pass())
                continue;

              double value = 0.0;
              if (options.strategy == BuildStrategy::Direct) {
                value = eval.element_direct(key, options.backend).value();
              } else {
                const AxisPair p = axis_pair(key, Axis::X, ParticlePair::P14);
                recurrence::FamilyContext ctx{key, Axis::X,
                                              ParticlePair::P14};
                ctx.base[0].nx = 0;
                ctx.base[3].nx = 0;
                auto it = families.find(ctx.base);
                if (it == families.end() ||
                    !it->second.contains(p.n_minus, p.n_plus)) {
                  // Grow monotonically so a rebuild never loses coverage.
                  const int n_fam =
                      it == families.end()
                          ? p.n_plus
                          : std::max(p.n_plus, it->second.n_max());
                  recurrence::FamilyTable table = recurrence::build_family(
                      eval, ctx, n_fam, options.backend);
                  it = families.insert_or_assign(ctx.base, std::move(table))
                           .first;
                }
                value =
                    it->second.element(p.n_minus, p.n_plus, a).value();
              }
              if (value != 0.0)
                out.emplace_back(key, value);
            }
    } catch (...) {
      errors[static_cast<std::size_t>(w)] = std::current_exception();
    }
  };

  if (nw == 1) {
    worker(0);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(nw));
    for (int w = 0; w < nw; ++w)
      pool.emplace_back(worker, w);
    for (auto &t : pool)
      t.join();
  }
  for (const auto &e : errors)
    if (e)
      std::rethrow_exception(e);

  for (const auto &chunk : produced)
    for (const auto &[key, value] : chunk)
      store.insert(key, value);
  return store;
}

} // namespace oscme::tensor
