#include "sllb/io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

#include "sllb/errors.hpp"

namespace sllb {

namespace {

class Writer {
 public:
  void bytes(const void* p, std::size_t n) {
    const auto* c = static_cast<const unsigned char*>(p);
    buf_.insert(buf_.end(), c, c + n);
  }
  void u64(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) buf_.push_back(static_cast<unsigned char>(v >> (8 * i)));
  }
  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) buf_.push_back(static_cast<unsigned char>(v >> (8 * i)));
  }
  void i32(std::int32_t v) { u32(static_cast<std::uint32_t>(v)); }
  void u8(std::uint8_t v) { buf_.push_back(v); }
  void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
  const std::vector<unsigned char>& data() const { return buf_; }

 private:
  std::vector<unsigned char> buf_;
};

class Reader {
 public:
  explicit Reader(std::vector<unsigned char> data) : buf_(std::move(data)) {}
  void need(std::size_t n) const {
    if (pos_ + n > buf_.size()) throw IoError("checkpoint is truncated");
  }
  std::uint64_t u64() {
    need(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= std::uint64_t(buf_[pos_ + i]) << (8 * i);
    pos_ += 8;
    return v;
  }
  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= std::uint32_t(buf_[pos_ + i]) << (8 * i);
    pos_ += 4;
    return v;
  }
  std::int32_t i32() { return static_cast<std::int32_t>(u32()); }
  std::uint8_t u8() {
    need(1);
    return buf_[pos_++];
  }
  double f64() { return std::bit_cast<double>(u64()); }
  void bytes(void* out, std::size_t n) {
    need(n);
    std::memcpy(out, buf_.data() + pos_, n);
    pos_ += n;
  }
  bool done() const { return pos_ == buf_.size(); }

 private:
  std::vector<unsigned char> buf_;
  std::size_t pos_ = 0;
};

std::ofstream open_text(const std::filesystem::path& file) {
  if (file.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(file.parent_path(), ec);
  }
  std::ofstream out(file);
  if (!out) throw IoError("cannot write " + file.string());
  out.precision(17);
  return out;
}

}  // namespace

void write_checkpoint(const std::filesystem::path& file, const Trajectory& traj, const DomainSpec& domain,
                      const ModelParams& params) {
  Writer w;
  w.bytes(kCheckpointMagic, 4);
  w.u32(kCheckpointVersion);
  w.i32(domain.dimension);
  for (double l : domain.lengths) w.f64(l);
  for (int n : domain.n_modes) w.i32(n);
  for (int m : domain.quad_points) w.i32(m);
  w.f64(params.kappa1);
  w.f64(params.kappa2);
  w.f64(params.gamma);
  w.f64(params.mu);
  w.u8(params.strat_gamma ? 1 : 0);
  w.u64(traj.state_stride);
  w.u64(traj.states.size());
  const std::size_t count = traj.states.empty() ? 0 : traj.states.front().coeffs().size();
  w.u64(count);
  for (std::size_t s = 0; s < traj.states.size(); ++s) {
    if (traj.states[s].coeffs().size() != count) throw DimensionError("snapshots of different sizes");
    w.f64(traj.times[s]);
    for (double c : traj.states[s].coeffs()) w.f64(c);
  }
  if (file.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(file.parent_path(), ec);
  }
  std::ofstream out(file, std::ios::binary);
  if (!out) throw IoError("cannot write " + file.string());
  out.write(reinterpret_cast<const char*>(w.data().data()), std::streamsize(w.data().size()));
  if (!out) throw IoError("write failed for " + file.string());
}

Checkpoint read_checkpoint(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw IoError("cannot open " + file.string());
  Reader r(std::vector<unsigned char>(std::istreambuf_iterator<char>(in), {}));
  char magic[4];
  r.bytes(magic, 4);
  if (std::memcmp(magic, kCheckpointMagic, 4) != 0) throw IoError(file.string() + " is not a trajectory checkpoint");
  const std::uint32_t version = r.u32();
  if (version != kCheckpointVersion) throw IoError("unsupported checkpoint version " + std::to_string(version));
  Checkpoint c;
  c.domain.dimension = r.i32();
  for (double& l : c.domain.lengths) l = r.f64();
  for (int& n : c.domain.n_modes) n = r.i32();
  for (int& m : c.domain.quad_points) m = r.i32();
  c.params.kappa1 = r.f64();
  c.params.kappa2 = r.f64();
  c.params.gamma = r.f64();
  c.params.mu = r.f64();
  c.params.strat_gamma = r.u8() != 0;
  c.stride = r.u64();
  const std::uint64_t snapshots = r.u64();
  const std::uint64_t count = r.u64();
  r.need(snapshots * (count + 1) * 8);
  for (std::uint64_t s = 0; s < snapshots; ++s) {
    c.times.push_back(r.f64());
    std::vector<double> coeffs(count);
    for (double& x : coeffs) x = r.f64();
    c.coefficients.push_back(std::move(coeffs));
  }
  if (!r.done()) throw IoError("trailing bytes in " + file.string());
  return c;
}

void write_ledger_csv(const std::filesystem::path& file, const EnergyLedger& ledger) {
  auto out = open_text(file);
  out << "time,half_l2,grad_sq,lap_sq,quartic,l4_4,cross_norm,linf_sq,f3_l2_sq,grad_quartic,udu_sq,remainder,"
         "int_grad_sq,int_lap_sq,int_quartic,int_l4_4,int_cross_pow,int_linf_sq,int_f3_l2_sq,int_grad_quartic,"
         "int_udu_sq,int_remainder,l2_source,stoch_l2,stoch_h1\n";
  for (const auto& r : ledger.rows) {
    const auto& n = r.now;
    out << r.time << ',' << n.half_l2 << ',' << n.grad_sq << ',' << n.lap_sq << ',' << n.quartic << ',' << n.l4_4
        << ',' << n.cross_norm << ',' << n.linf_sq << ',' << n.f3_l2_sq << ',' << n.grad_quartic << ','
        << n.udu_sq << ',' << n.remainder << ',' << r.int_grad_sq << ',' << r.int_lap_sq << ',' << r.int_quartic
        << ',' << r.int_l4_4 << ',' << r.int_cross_pow << ',' << r.int_linf_sq << ',' << r.int_f3_l2_sq << ','
        << r.int_grad_quartic << ',' << r.int_udu_sq << ',' << r.int_remainder << ',' << r.l2_source << ','
        << r.stoch_l2 << ',' << r.stoch_h1 << '\n';
  }
}

void write_residual_csv(const std::filesystem::path& file, const EnergyLedger& ledger, std::span<const double> l2,
                        std::span<const double> h1) {
  if (l2.size() != ledger.rows.size() || (!h1.empty() && h1.size() != ledger.rows.size()))
    throw DimensionError("residual series do not match the ledger");
  auto out = open_text(file);
  out << "time,l2_residual" << (h1.empty() ? "" : ",h1_residual") << '\n';
  for (std::size_t i = 0; i < l2.size(); ++i) {
    out << ledger.rows[i].time << ',' << l2[i];
    if (!h1.empty()) out << ',' << h1[i];
    out << '\n';
  }
}

void write_structure_csv(const std::filesystem::path& file, const StructureFunction& sf) {
  auto out = open_text(file);
  out << "# norm=" << (sf.norm == IncrementNorm::l2 ? "L2" : "L3/2") << " slope=" << sf.slope << '\n';
  out << "lag,moment,pairs\n";
  for (std::size_t i = 0; i < sf.lags.size(); ++i)
    out << sf.lags[i] << ',' << sf.moments[i] << ',' << sf.pairs[i] << '\n';
}

void write_moments_csv(const std::filesystem::path& file, const std::vector<MomentRow>& rows) {
  auto out = open_text(file);
  out << "quantity,p,mean,std_error,count\n";
  for (const auto& r : rows)
    out << r.quantity << ',' << r.p << ',' << r.value.mean << ',' << r.value.std_error << ',' << r.value.count
        << '\n';
}

}  // namespace sllb
