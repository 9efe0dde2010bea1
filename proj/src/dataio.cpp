#include "cosparse/dataio.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>

#include "cosparse/errors.hpp"
#include "cosparse/linalg.hpp"

namespace cosparse {

namespace {

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

double parse_number(std::string_view cell, std::size_t line) {
    const std::string t = trim(cell);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (t.empty() || ec != std::errc() || ptr != t.data() + t.size())
        throw ParseError("not a number: '" + t + "'", line);
    if (!std::isfinite(v)) throw ParseError("non-finite value: '" + t + "'", line);
    return v;
}

// "# key=value" -> value, or throws.
std::string header_value(const std::string& line, const std::string& key, std::size_t lineno) {
    const std::string prefix = "# " + key + "=";
    if (line.rfind(prefix, 0) != 0) throw ParseError("expected header '" + prefix + "<value>'", lineno);
    return line.substr(prefix.size());
}

}  // namespace

std::string format_double(double v) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

EcgRecording parse_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    EcgRecording rec;

    if (!std::getline(in, line)) throw ParseError("missing sample_rate header", 1);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    rec.sample_rate = parse_number(header_value(line, "sample_rate", 1), 1);
    if (!(rec.sample_rate > 0.0)) throw ParseError("sample_rate must be positive", 1);

    if (!std::getline(in, line)) throw ParseError("missing subject header", 2);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    rec.subject_id = header_value(line, "subject", 2);

    std::vector<double> values;
    std::size_t rows = 0;
    std::size_t lineno = 2;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (trim(line).empty()) continue;
        std::size_t cols = 0;
        std::size_t pos = 0;
        while (true) {
            const auto comma = line.find(',', pos);
            values.push_back(parse_number(std::string_view(line).substr(pos, comma - pos), lineno));
            ++cols;
            if (comma == std::string::npos) break;
            pos = comma + 1;
        }
        if (rows == 0) {
            rec.channels = cols;
        } else if (cols != rec.channels) {
            throw ParseError("expected " + std::to_string(rec.channels) + " columns, found " +
                                 std::to_string(cols),
                             lineno);
        }
        ++rows;
    }
    if (rows > 0) rec.samples = DenseMatrix(rows, rec.channels, std::move(values));
    return rec;
}

EcgRecording load_csv(const std::filesystem::path& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw Error("cannot open " + path.string());
    std::ostringstream ss;
    ss << f.rdbuf();
    try {
        return parse_csv(ss.str());
    } catch (const ParseError& e) {
        throw ParseError(path.string() + ": " + e.what(), e.line());
    }
}

std::string format_csv(const EcgRecording& rec) {
    std::string out = "# sample_rate=" + format_double(rec.sample_rate) + "\n";
    out += "# subject=" + rec.subject_id + "\n";
    for (std::size_t r = 0; r < rec.samples.rows(); ++r) {
        auto row = rec.samples.row(r);
        for (std::size_t c = 0; c < row.size(); ++c) {
            if (c) out += ',';
            out += format_double(row[c]);
        }
        out += '\n';
    }
    return out;
}

void save_csv(const EcgRecording& rec, const std::filesystem::path& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error("cannot write " + path.string());
    f << format_csv(rec);
    if (!f) throw Error("write failed: " + path.string());
}

std::vector<Segment> segment(const EcgRecording& rec, double seconds) {
    const double exact = seconds * rec.sample_rate;
    const double rounded = std::round(exact);
    if (!(seconds > 0.0) || rounded < 1.0 || std::abs(exact - rounded) > 1e-9 * std::max(1.0, exact))
        throw ConfigError("window of " + format_double(seconds) + " s at " + format_double(rec.sample_rate) +
                          " Hz is not a whole number of samples");
    const auto len = static_cast<std::size_t>(rounded);
    std::vector<Segment> out;
    const std::size_t count = rec.total_samples() / len;
    out.reserve(count);
    for (std::size_t w = 0; w < count; ++w) {
        DenseMatrix data(len, rec.channels);
        for (std::size_t r = 0; r < len; ++r) {
            auto src = rec.samples.row(w * len + r);
            std::copy(src.begin(), src.end(), data.row(r).begin());
        }
        out.push_back({std::move(data), rec.subject_id, w});
    }
    return out;
}

EcgRecording concatenate(const std::vector<Segment>& segments, double sample_rate) {
    EcgRecording rec;
    rec.sample_rate = sample_rate;
    if (segments.empty()) return rec;
    rec.subject_id = segments.front().subject_id;
    rec.channels = segments.front().channels();
    std::vector<double> values;
    std::size_t rows = 0;
    for (const auto& s : segments) {
        if (s.channels() != rec.channels) throw ShapeError("concatenate: channel count mismatch");
        values.insert(values.end(), s.data.data().begin(), s.data.data().end());
        rows += s.n_signal();
    }
    rec.samples = DenseMatrix(rows, rec.channels, std::move(values));
    return rec;
}

namespace {

// Multiples of 2^-10 stay exact through the sums below.
double dyadic(double v) { return std::round(v * 1024.0) / 1024.0; }

std::vector<std::size_t> choose_sorted(std::size_t universe, std::size_t k, std::mt19937_64& rng) {
    std::vector<std::size_t> idx(universe);
    std::iota(idx.begin(), idx.end(), 0);
    std::shuffle(idx.begin(), idx.end(), rng);
    idx.resize(k);
    std::sort(idx.begin(), idx.end());
    return idx;
}

std::vector<std::size_t> complement(std::size_t universe, const std::vector<std::size_t>& chosen) {
    std::vector<bool> taken(universe, false);
    for (auto i : chosen) taken[i] = true;
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < universe; ++i)
        if (!taken[i]) out.push_back(i);
    return out;
}

}  // namespace

CosparseSample synth_cosparse(std::size_t n_signal, std::size_t cosupport_size, std::size_t channels,
                              bool shared, std::uint64_t seed) {
    if (n_signal < 3) throw ConfigError("synth_cosparse needs n_signal >= 3");
    if (channels < 1) throw ConfigError("synth_cosparse needs at least one channel");
    const std::size_t interior = n_signal - 2;
    if (cosupport_size > interior)
        throw ConfigError("co-support size " + std::to_string(cosupport_size) + " exceeds the " +
                          std::to_string(interior) + " interior rows");

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    const std::size_t breaks = interior - cosupport_size;

    CosparseSample out;
    out.segment.data = DenseMatrix(n_signal, channels);
    out.segment.subject_id = "synthetic-" + std::to_string(seed);
    std::vector<std::size_t> kinks;
    for (std::size_t c = 0; c < channels; ++c) {
        if (c == 0 || !shared) kinks = choose_sorted(interior, breaks, rng);
        // Row i of the second-order operator is x_i - 2 x_{i+1} + x_{i+2}, so a
        // kink at row i changes the slope entering sample i + 2.
        std::vector<double> jump(interior, 0.0);
        for (auto i : kinks) {
            double j = normal(rng);
            j = std::copysign(0.25 + std::abs(j), j);
            jump[i] = dyadic(j);
        }
        double x = dyadic(4.0 * normal(rng));
        double slope = dyadic(0.1 * normal(rng));
        out.segment.data(0, c) = x;
        for (std::size_t k = 1; k < n_signal; ++k) {
            if (k >= 2) slope += jump[k - 2];
            x += slope;
            out.segment.data(k, c) = x;
        }
        out.cosupports.push_back(complement(interior, kinks));
    }
    return out;
}

SparseSample synth_sparse(const SynthesisDictionary& psi, std::size_t sparsity, std::size_t channels,
                          bool shared, std::uint64_t seed) {
    const std::size_t m = psi.matrix.cols();
    if (sparsity > m) throw ConfigError("sparsity exceeds dictionary size");
    if (channels < 1) throw ConfigError("synth_sparse needs at least one channel");
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    SparseSample out;
    out.coefficients = DenseMatrix(m, channels);
    std::vector<std::size_t> support;
    for (std::size_t c = 0; c < channels; ++c) {
        if (c == 0 || !shared) support = choose_sorted(m, sparsity, rng);
        for (auto j : support) {
            double a = normal(rng);
            out.coefficients(j, c) = std::copysign(0.1 + std::abs(a), a);
        }
        out.supports.push_back(support);
    }
    out.segment.data = linalg::matmul(psi.matrix, out.coefficients);
    out.segment.subject_id = "synthetic-sparse-" + std::to_string(seed);
    return out;
}

}  // namespace cosparse
