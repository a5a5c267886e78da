#include "soskit/sdpa_io.hpp"

#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace sos {

std::string sdpa_text(const SdpProblem& sdp) {
  std::ostringstream os;
  os << "\"SDPA sparse; F0 = objective matrix, Fi = constraint matrices\"\n";
  if (sdp.maximize) os << "*MAXIMIZE\n";
  os << sdp.num_constraints << " = mDIM\n";
  os << sdp.block_sizes.size() << " = nBLOCK\n";
  for (size_t i = 0; i < sdp.block_sizes.size(); ++i)
    os << sdp.block_sizes[i] << (i + 1 < sdp.block_sizes.size() ? " " : "");
  os << "\n";
  char buf[64];
  for (int i = 0; i < sdp.num_constraints; ++i) {
    std::snprintf(buf, sizeof buf, "%.17g", sdp.b[i]);
    os << buf << (i + 1 < sdp.num_constraints ? " " : "");
  }
  os << "\n";
  for (auto& e : sdp.entries) {
    std::snprintf(buf, sizeof buf, "%.17g", e.value);
    os << (e.constraint + 1) << " " << (e.block + 1) << " " << (e.row + 1) << " "
       << (e.col + 1) << " " << buf << "\n";
  }
  return os.str();
}

void emit_sdpa(const SdpProblem& sdp, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("emit_sdpa: cannot open " + path);
  f << sdpa_text(sdp);
}

namespace {

// Strips comments and separators; SDPA allows {}, (), and commas.
std::string clean_line(const std::string& line) {
  if (!line.empty() && (line[0] == '"' || line[0] == '*')) return "";
  std::string out = line;
  for (char& c : out)
    if (c == '{' || c == '}' || c == '(' || c == ')' || c == ',' || c == '=') c = ' ';
  // Drop trailing words like mDIM / nBLOCK.
  std::istringstream is(out);
  std::string tok, kept;
  while (is >> tok) {
    bool numeric = tok.find_first_not_of("+-0123456789.eE") == std::string::npos;
    if (!numeric) continue;
    kept += tok + " ";
  }
  return kept;
}

}  // namespace

SdpProblem parse_sdpa_text(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::vector<double> numbers;
  // Stage 0: mDIM; 1: nBLOCK; 2: block sizes; 3: c vector; 4: entries.
  SdpProblem sdp;
  int stage = 0;
  size_t nblock = 0;
  while (std::getline(in, line)) {
    if (line.rfind("*MAXIMIZE", 0) == 0) {
      sdp.maximize = true;
      continue;
    }
    std::string cleaned = clean_line(line);
    if (cleaned.empty()) continue;
    std::istringstream is(cleaned);
    if (stage == 0) {
      is >> sdp.num_constraints;
      if (!is) throw std::runtime_error("parse_sdpa: malformed mDIM");
      sdp.b.assign(sdp.num_constraints, 0.0);
      stage = 1;
    } else if (stage == 1) {
      is >> nblock;
      if (!is) throw std::runtime_error("parse_sdpa: malformed nBLOCK");
      stage = 2;
    } else if (stage == 2) {
      int v;
      while (is >> v) sdp.block_sizes.push_back(v);
      if (sdp.block_sizes.size() < nblock) continue;  // sizes may span lines
      if (sdp.block_sizes.size() != nblock)
        throw std::runtime_error("parse_sdpa: block size count mismatch");
      stage = 3;
    } else if (stage == 3) {
      double v;
      while (is >> v) numbers.push_back(v);
      if (numbers.size() < static_cast<size_t>(sdp.num_constraints)) continue;
      if (numbers.size() != static_cast<size_t>(sdp.num_constraints))
        throw std::runtime_error("parse_sdpa: c vector length mismatch");
      for (int i = 0; i < sdp.num_constraints; ++i) sdp.b[i] = numbers[i];
      stage = 4;
    } else {
      long mat, blk, i, j;
      double v;
      if (!(is >> mat >> blk >> i >> j >> v))
        throw std::runtime_error("parse_sdpa: malformed entry line: " + line);
      if (blk < 1 || blk > static_cast<long>(nblock) || i < 1 || j < 1 || i > j)
        throw std::runtime_error("parse_sdpa: entry indices out of range: " + line);
      sdp.entries.push_back(SdpEntry{static_cast<int>(mat) - 1, static_cast<int>(blk) - 1,
                                     static_cast<int>(i) - 1, static_cast<int>(j) - 1, v});
    }
  }
  if (stage < 4) throw std::runtime_error("parse_sdpa: truncated file");
  return sdp;
}

SdpProblem parse_sdpa(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("parse_sdpa: cannot open " + path);
  std::ostringstream os;
  os << f.rdbuf();
  return parse_sdpa_text(os.str());
}

void write_solution(const SdpSolution& sol, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("write_solution: cannot open " + path);
  char buf[64];
  f << "y";
  for (int i = 0; i < sol.y.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g", sol.y(i));
    f << " " << buf;
  }
  f << "\n";
  for (size_t b = 0; b < sol.X.size(); ++b)
    for (int i = 0; i < sol.X[b].rows(); ++i)
      for (int j = i; j < sol.X[b].cols(); ++j) {
        if (sol.X[b](i, j) == 0.0) continue;
        std::snprintf(buf, sizeof buf, "%.17g", sol.X[b](i, j));
        f << (b + 1) << " " << (i + 1) << " " << (j + 1) << " " << buf << "\n";
      }
}

SdpSolution read_solution(const std::string& path, const SdpProblem& shape) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("read_solution: cannot open " + path);
  SdpSolution sol;
  sol.y = Eigen::VectorXd::Zero(shape.num_constraints);
  for (size_t b = 0; b < shape.block_sizes.size(); ++b)
    sol.X.push_back(Eigen::MatrixXd::Zero(shape.block_dim(b), shape.block_dim(b)));
  std::string line;
  bool have_y = false;
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    std::istringstream is(line);
    if (!have_y) {
      std::string tag;
      is >> tag;
      if (tag != "y") throw std::runtime_error("read_solution: expected y line");
      for (int i = 0; i < shape.num_constraints; ++i)
        if (!(is >> sol.y(i))) throw std::runtime_error("read_solution: short y line");
      have_y = true;
      continue;
    }
    long b, i, j;
    double v;
    if (!(is >> b >> i >> j >> v))
      throw std::runtime_error("read_solution: malformed entry: " + line);
    if (b < 1 || b > static_cast<long>(sol.X.size()))
      throw std::runtime_error("read_solution: block out of range");
    sol.X[b - 1](i - 1, j - 1) = v;
    sol.X[b - 1](j - 1, i - 1) = v;
  }
  if (!have_y) throw std::runtime_error("read_solution: missing y line");
  sol.status = SdpStatus::Optimal;
  return sol;
}

}  // namespace sos
