#include "skyris/nn/checkpoint.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>

#include "skyris/errors.hpp"

namespace skyris::nn {
namespace {

constexpr char kMagic[8] = {'S', 'K', 'Y', 'R', 'I', 'S', 'C', 'K'};

template <class T>
void put(std::ostream& os, T v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

void put_string(std::ostream& os, const std::string& s) {
  put<std::uint32_t>(os, static_cast<std::uint32_t>(s.size()));
  os.write(s.data(), static_cast<std::streamsize>(s.size()));
}

void put_doubles(std::ostream& os, std::span<const double> v) {
  put<std::uint64_t>(os, v.size());
  os.write(reinterpret_cast<const char*>(v.data()), static_cast<std::streamsize>(v.size() * sizeof(double)));
}

class Reader {
 public:
  explicit Reader(std::istream& is) : is_(is) {}

  template <class T>
  T get() {
    T v{};
    is_.read(reinterpret_cast<char*>(&v), sizeof(T));
    if (!is_) throw CheckpointError("checkpoint truncated");
    return v;
  }

  std::string get_string() {
    const auto n = get<std::uint32_t>();
    if (n > (1u << 16)) throw CheckpointError("checkpoint name too long");
    std::string s(n, '\0');
    is_.read(s.data(), n);
    if (!is_) throw CheckpointError("checkpoint truncated");
    return s;
  }

  std::vector<double> get_doubles(std::uint64_t limit) {
    const auto n = get<std::uint64_t>();
    if (n > limit) throw CheckpointError("checkpoint array length out of range");
    std::vector<double> v(n);
    is_.read(reinterpret_cast<char*>(v.data()), static_cast<std::streamsize>(n * sizeof(double)));
    if (!is_) throw CheckpointError("checkpoint truncated");
    return v;
  }

 private:
  std::istream& is_;
};

}  // namespace

const Mlp& Checkpoint::net(const std::string& name) const {
  for (const auto& [n, m] : nets)
    if (n == name) return m;
  throw CheckpointError("checkpoint has no network '" + name + "'");
}

const std::vector<double>& Checkpoint::vec(const std::string& name) const {
  for (const auto& [n, v] : vectors)
    if (n == name) return v;
  throw CheckpointError("checkpoint has no vector '" + name + "'");
}

void save_checkpoint(const std::string& path, const Checkpoint& ck) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw CheckpointError("cannot open '" + path + "' for writing");
  os.write(kMagic, sizeof(kMagic));
  put<std::uint32_t>(os, kCheckpointVersion);
  put<std::uint32_t>(os, static_cast<std::uint32_t>(ck.nets.size()));
  for (const auto& [name, net] : ck.nets) {
    put_string(os, name);
    put<std::uint32_t>(os, static_cast<std::uint32_t>(net.output()));
    put<std::uint32_t>(os, static_cast<std::uint32_t>(net.widths().size()));
    for (int w : net.widths()) put<std::uint32_t>(os, static_cast<std::uint32_t>(w));
    put_doubles(os, net.params());
  }
  put<std::uint32_t>(os, static_cast<std::uint32_t>(ck.vectors.size()));
  for (const auto& [name, v] : ck.vectors) {
    put_string(os, name);
    put_doubles(os, v);
  }
  if (!os) throw CheckpointError("write failed for '" + path + "'");

  nlohmann::json meta = ck.meta;
  meta["format"] = "SKYRISCK";
  meta["version"] = kCheckpointVersion;
  meta["networks"] = nlohmann::json::array();
  for (const auto& [name, net] : ck.nets)
    meta["networks"].push_back({{"name", name},
                                {"widths", net.widths()},
                                {"output", net.output() == Output::tanh ? "tanh" : "identity"},
                                {"param_count", net.param_count()}});
  std::ofstream js(path + ".json");
  js << meta.dump(2) << '\n';
  if (!js) throw CheckpointError("write failed for '" + path + ".json'");
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw CheckpointError("cannot open '" + path + "'");
  Reader r(is);
  char magic[8];
  is.read(magic, sizeof(magic));
  if (!is || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) throw CheckpointError("'" + path + "' is not a checkpoint");
  const auto version = r.get<std::uint32_t>();
  if (version != kCheckpointVersion) throw CheckpointError("unsupported checkpoint version " + std::to_string(version));

  Checkpoint ck;
  const auto n_nets = r.get<std::uint32_t>();
  for (std::uint32_t k = 0; k < n_nets; ++k) {
    std::string name = r.get_string();
    const auto act = r.get<std::uint32_t>();
    if (act > 1) throw CheckpointError("unknown output activation");
    const auto n_widths = r.get<std::uint32_t>();
    if (n_widths < 2 || n_widths > 64) throw CheckpointError("bad layer count");
    std::vector<int> widths;
    for (std::uint32_t l = 0; l < n_widths; ++l) {
      const auto w = r.get<std::uint32_t>();
      if (w == 0 || w > (1u << 20)) throw CheckpointError("bad layer width");
      widths.push_back(static_cast<int>(w));
    }
    Mlp net(widths, static_cast<Output>(act));
    const auto params = r.get_doubles(net.param_count());
    if (params.size() != net.param_count()) throw CheckpointError("parameter count does not match widths");
    net.set_flat(params);
    ck.nets.emplace_back(std::move(name), std::move(net));
  }
  const auto n_vec = r.get<std::uint32_t>();
  for (std::uint32_t k = 0; k < n_vec; ++k) {
    std::string name = r.get_string();
    ck.vectors.emplace_back(std::move(name), r.get_doubles(1u << 24));
  }

  std::ifstream js(path + ".json");
  if (js) {
    try {
      ck.meta = nlohmann::json::parse(js);
    } catch (const nlohmann::json::exception& e) {
      throw CheckpointError(std::string("bad checkpoint metadata: ") + e.what());
    }
  }
  return ck;
}

}  // namespace skyris::nn
