#ifndef SGBS_CHECKPOINT_HPP
#define SGBS_CHECKPOINT_HPP

#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>

#include "sgbs/common.hpp"
#include "sgbs/policy.hpp"

namespace sgbs {

/// Plain-text key/value checkpoint with explicit shapes. Doubles are
/// written with 17 significant digits, so save/load round-trips exactly.
inline void save_checkpoint(std::ostream& out, const PolicyParams& params,
                            const EasParams* eas = nullptr) {
  out << "theta " << params.theta.size();
  for (double v : params.theta) out << " " << format_double(v);
  out << "\n";
  out << "temperature " << format_double(params.temperature) << "\n";
  if (eas) {
    out << "eas.shape " << eas->hidden << " " << eas->features << "\n";
    out << "eas.W1 " << eas->w1.size();
    for (double v : eas->w1) out << " " << format_double(v);
    out << "\n";
    out << "eas.b1 " << eas->b1.size();
    for (double v : eas->b1) out << " " << format_double(v);
    out << "\n";
    out << "eas.w2 " << eas->w2.size();
    for (double v : eas->w2) out << " " << format_double(v);
    out << "\n";
    out << "eas.b2 " << format_double(eas->b2) << "\n";
  }
}

inline void save_checkpoint_file(const std::string& path, const PolicyParams& params,
                                 const EasParams* eas = nullptr) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write checkpoint: " + path);
  save_checkpoint(out, params, eas);
}

struct Checkpoint {
  PolicyParams params;
  std::optional<EasParams> eas;
};

inline Checkpoint load_checkpoint(std::istream& in) {
  Checkpoint ck;
  std::string line;
  bool have_theta = false;
  auto read_vector = [](std::istringstream& ss, const std::string& key) {
    std::size_t count = 0;
    if (!(ss >> count)) throw std::runtime_error("checkpoint: missing count for " + key);
    std::vector<double> v(count);
    for (std::size_t i = 0; i < count; ++i)
      if (!(ss >> v[i])) throw std::runtime_error("checkpoint: truncated values for " + key);
    return v;
  };
  while (std::getline(in, line)) {
    std::istringstream ss(line);
    std::string key;
    if (!(ss >> key)) continue;
    if (key == "theta") {
      ck.params.theta = read_vector(ss, key);
      have_theta = true;
    } else if (key == "temperature") {
      if (!(ss >> ck.params.temperature)) throw std::runtime_error("checkpoint: bad temperature");
    } else if (key == "eas.shape") {
      EasParams e;
      if (!(ss >> e.hidden >> e.features)) throw std::runtime_error("checkpoint: bad eas.shape");
      ck.eas = e;
    } else if (key == "eas.W1") {
      if (!ck.eas) throw std::runtime_error("checkpoint: eas.W1 before eas.shape");
      ck.eas->w1 = read_vector(ss, key);
    } else if (key == "eas.b1") {
      if (!ck.eas) throw std::runtime_error("checkpoint: eas.b1 before eas.shape");
      ck.eas->b1 = read_vector(ss, key);
    } else if (key == "eas.w2") {
      if (!ck.eas) throw std::runtime_error("checkpoint: eas.w2 before eas.shape");
      ck.eas->w2 = read_vector(ss, key);
    } else if (key == "eas.b2") {
      if (!ck.eas) throw std::runtime_error("checkpoint: eas.b2 before eas.shape");
      if (!(ss >> ck.eas->b2)) throw std::runtime_error("checkpoint: bad eas.b2");
    } else {
      throw std::runtime_error("checkpoint: unknown key '" + key + "'");
    }
  }
  if (!have_theta) throw std::runtime_error("checkpoint: missing theta");
  if (ck.params.temperature <= 0.0) throw std::runtime_error("checkpoint: temperature must be > 0");
  if (ck.eas) {
    const std::size_t hf = static_cast<std::size_t>(ck.eas->hidden) * ck.eas->features;
    if (ck.eas->w1.size() != hf || ck.eas->b1.size() != static_cast<std::size_t>(ck.eas->hidden) ||
        ck.eas->w2.size() != static_cast<std::size_t>(ck.eas->hidden))
      throw std::runtime_error("checkpoint: eas shape mismatch");
  }
  return ck;
}

inline Checkpoint load_checkpoint_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open checkpoint: " + path);
  return load_checkpoint(in);
}

}  // namespace sgbs

#endif  // SGBS_CHECKPOINT_HPP
