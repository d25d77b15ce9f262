#include "levnano/timeseries_io.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

#include "detail.hpp"
#include "levnano/errors.hpp"

namespace levnano {

namespace {

constexpr char kMagic[4] = {'L', 'E', 'V', 'T'};

template <class U>
void put_le(std::string& out, U v) {
  for (std::size_t i = 0; i < sizeof(U); ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_f64(std::string& out, double v) { put_le(out, std::bit_cast<std::uint64_t>(v)); }

class Reader {
 public:
  explicit Reader(const std::string& b) : b_(b) {}

  template <class U>
  U get(const char* what) {
    need(sizeof(U), what);
    U v = 0;
    for (std::size_t i = 0; i < sizeof(U); ++i)
      v |= static_cast<U>(static_cast<unsigned char>(b_[pos_ + i])) << (8 * i);
    pos_ += sizeof(U);
    return v;
  }
  double f64(const char* what) { return std::bit_cast<double>(get<std::uint64_t>(what)); }
  std::string bytes(std::size_t n, const char* what) {
    need(n, what);
    std::string s = b_.substr(pos_, n);
    pos_ += n;
    return s;
  }
  std::size_t pos() const { return pos_; }
  std::size_t remaining() const { return b_.size() - pos_; }

  [[noreturn]] void fail(std::size_t at, const std::string& msg) const {
    throw IoError("LEVT parse error at byte offset " + std::to_string(at) + ": " + msg);
  }

 private:
  void need(std::size_t n, const char* what) const {
    if (remaining() < n) fail(pos_, std::string("truncated while reading ") + what);
  }
  const std::string& b_;
  std::size_t pos_ = 0;
};

}  // namespace

std::string encode_levt(const LevtRecord& rec) {
  if (rec.version != 1 && rec.version != 2) throw InvalidParameter("LEVT version must be 1 or 2");
  if (rec.channels.empty()) throw InvalidParameter("LEVT record has no channels");
  if (rec.version == 1 && rec.channels.size() != 1)
    throw InvalidParameter("LEVT version 1 holds exactly one channel");
  const std::size_t n = rec.channels.front().size();
  for (const auto& ch : rec.channels)
    if (ch.size() != n) throw InvalidParameter("LEVT channels differ in length");

  std::string out(kMagic, 4);
  put_le<std::uint32_t>(out, rec.version);
  put_f64(out, rec.sample_rate);
  put_le<std::uint64_t>(out, n);
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(rec.label.size()));
  out += rec.label;
  if (rec.version == 2) {
    put_le<std::uint32_t>(out, static_cast<std::uint32_t>(rec.channels.size()));
    put_f64(out, rec.t0);
    put_f64(out, rec.f_lo);
  }
  out.reserve(out.size() + 8 * n * rec.channels.size());
  for (const auto& ch : rec.channels)
    for (double v : ch) put_f64(out, v);
  return out;
}

LevtRecord decode_levt(const std::string& b) {
  Reader r(b);
  if (b.size() < 4) r.fail(0, "truncated magic");
  for (std::size_t i = 0; i < 4; ++i)
    if (b[i] != kMagic[i]) r.fail(i, "bad magic, expected \"LEVT\"");
  r.bytes(4, "magic");

  LevtRecord rec;
  std::size_t at = r.pos();
  rec.version = r.get<std::uint32_t>("version");
  if (rec.version != 1 && rec.version != 2) r.fail(at, "unsupported version " + std::to_string(rec.version));
  at = r.pos();
  rec.sample_rate = r.f64("sample rate");
  if (!(rec.sample_rate > 0) || !std::isfinite(rec.sample_rate)) r.fail(at, "sample rate must be > 0");
  const std::uint64_t n = r.get<std::uint64_t>("sample count");
  const std::uint32_t len = r.get<std::uint32_t>("label length");
  rec.label = r.bytes(len, "label");
  std::uint32_t nch = 1;
  if (rec.version == 2) {
    at = r.pos();
    nch = r.get<std::uint32_t>("channel count");
    if (nch == 0) r.fail(at, "zero channels");
    rec.t0 = r.f64("t0");
    rec.f_lo = r.f64("f_lo");
  }
  if (n > r.remaining() / 8 / nch || r.remaining() != 8 * n * nch)
    r.fail(r.pos(), "payload holds " + std::to_string(r.remaining()) + " bytes, header promises " +
                        std::to_string(8 * n * nch));
  rec.channels.assign(nch, std::vector<double>(n));
  for (auto& ch : rec.channels)
    for (auto& v : ch) v = r.f64("sample");
  return rec;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, const std::string& bytes) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("write to '" + path.string() + "' failed");
}

void write_levt(const std::filesystem::path& path, const TimeSeries& ts) {
  LevtRecord rec;
  rec.version = 1;
  rec.sample_rate = ts.sample_rate;
  rec.label = ts.label;
  rec.channels = {ts.values};
  write_file(path, encode_levt(rec));
}

void write_levt(const std::filesystem::path& path, const QuadratureSeries& q) {
  LevtRecord rec;
  rec.version = 2;
  rec.sample_rate = q.sample_rate;
  rec.label = q.label;
  rec.t0 = q.t0;
  rec.f_lo = q.f_lo;
  rec.channels = {q.X, q.Y};
  write_file(path, encode_levt(rec));
}

LevtRecord read_levt(const std::filesystem::path& path) {
  try {
    return decode_levt(read_file(path));
  } catch (const IoError& e) {
    throw IoError(path.string() + ": " + e.what());
  }
}

TimeSeries read_timeseries(const std::filesystem::path& path) {
  LevtRecord rec = read_levt(path);
  if (rec.channels.size() != 1)
    throw IoError(path.string() + ": expected a single-channel displacement record");
  TimeSeries ts;
  ts.sample_rate = rec.sample_rate;
  ts.t0 = rec.t0;
  ts.label = rec.label;
  ts.values = std::move(rec.channels.front());
  return ts;
}

QuadratureSeries read_quadratures(const std::filesystem::path& path) {
  LevtRecord rec = read_levt(path);
  if (rec.channels.size() != 2) throw IoError(path.string() + ": expected a two-channel quadrature record");
  QuadratureSeries q;
  q.sample_rate = rec.sample_rate;
  q.t0 = rec.t0;
  q.f_lo = rec.f_lo;
  q.label = rec.label;
  q.X = std::move(rec.channels[0]);
  q.Y = std::move(rec.channels[1]);
  return q;
}

void write_csv(const std::filesystem::path& path, const TimeSeries& ts) {
  std::string s = "t,value\n";
  s.reserve(ts.size() * 48);
  for (std::size_t i = 0; i < ts.size(); ++i) {
    s += detail::fmt(ts.time(i));
    s += ',';
    s += detail::fmt(ts.values[i]);
    s += '\n';
  }
  write_file(path, s);
}

void write_csv(const std::filesystem::path& path, const QuadratureSeries& q) {
  std::string s = "t,X,Y,R,R2\n";
  s.reserve(q.size() * 120);
  for (std::size_t i = 0; i < q.size(); ++i) {
    double r2 = q.X[i] * q.X[i] + q.Y[i] * q.Y[i];
    s += detail::fmt(q.t0 + static_cast<double>(i) / q.sample_rate) + ',' + detail::fmt(q.X[i]) + ',' +
         detail::fmt(q.Y[i]) + ',' + detail::fmt(std::sqrt(r2)) + ',' + detail::fmt(r2) + '\n';
  }
  write_file(path, s);
}

}  // namespace levnano
