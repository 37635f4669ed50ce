// Persistence for the correlator memo table.
//
// Format ("psicache v1"): UTF-8 text, LF line endings. First line is the
// header, then one record per entry:
//
//     <g>;<d1,d2,...>;<num>/<den>
//
// with the partition sorted non-increasing, the value in canonical lowest
// terms ("num" alone when den = 1), and records sorted by key. Files are
// written to a temporary name and renamed into place atomically.
#pragma once

#include <cstddef>
#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>

#include "psi/arith.hpp"
#include "psi/correlator.hpp"
#include "psi/partition.hpp"

namespace psi {

inline constexpr std::string_view kCacheHeader = "psicache v1";

class CacheFormatError : public std::runtime_error {
  public:
    CacheFormatError(std::size_t line, const std::string& what)
        : std::runtime_error("cache parse error at line " + std::to_string(line) + ": " + what),
          line_(line) {}
    std::size_t line() const { return line_; }

  private:
    std::size_t line_;
};

// Writes header plus one record per cache entry; returns the record count.
inline std::size_t save_cache(const MemoCache& cache, std::ostream& out) {
    out << kCacheHeader << '\n';
    const auto entries = cache.sorted_entries();
    for (const auto& [key, value] : entries)
        out << key.genus << ';' << to_text(key.parts) << ';' << value.str() << '\n';
    if (!out)
        throw std::runtime_error("save_cache: write failure");
    return entries.size();
}

inline std::size_t save_cache(const MemoCache& cache, const std::filesystem::path& path) {
    const auto tmp = path.string() + ".tmp";
    std::size_t count = 0;
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out)
            throw std::runtime_error("save_cache: cannot open " + tmp);
        count = save_cache(cache, out);
        out.flush();
        if (!out)
            throw std::runtime_error("save_cache: write failure on " + tmp);
    }
    std::filesystem::rename(tmp, path);
    return count;
}

// Loads records into `cache`; returns the record count. Malformed input
// raises CacheFormatError naming the offending (1-based) line.
inline std::size_t load_cache(std::istream& in, MemoCache& cache) {
    std::string line;
    if (!std::getline(in, line))
        throw CacheFormatError(1, "missing header");
    if (!line.empty() && line.back() == '\r')
        line.pop_back();
    if (line != kCacheHeader)
        throw CacheFormatError(1, "unsupported header '" + line + "'");

    std::size_t count = 0;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (line.empty())
            throw CacheFormatError(lineno, "empty record");
        if (line.find_first_of(" \t") != std::string::npos)
            throw CacheFormatError(lineno, "whitespace in record");
        const auto sep1 = line.find(';');
        const auto sep2 = sep1 == std::string::npos ? std::string::npos : line.find(';', sep1 + 1);
        if (sep1 == std::string::npos || sep2 == std::string::npos)
            throw CacheFormatError(lineno, "expected '<g>;<parts>;<value>'");
        try {
            const std::string g_text = line.substr(0, sep1);
            if (g_text.empty() || g_text.find_first_not_of("0123456789") != std::string::npos)
                throw std::invalid_argument("bad genus field '" + g_text + "'");
            const long long g = std::stoll(g_text);
            const Partition parts =
                partition_from_text(std::string_view(line).substr(sep1 + 1, sep2 - sep1 - 1));
            Partition sorted = parts;
            std::sort(sorted.begin(), sorted.end(), std::greater<Part>());
            if (sorted != parts)
                throw std::invalid_argument("partition not sorted non-increasing");
            const ExactRational value =
                ExactRational::parse(std::string_view(line).substr(sep2 + 1));
            cache.insert(CorrelatorKey{g, parts}, value);
        } catch (const std::logic_error& e) {
            throw CacheFormatError(lineno, e.what());
        }
        ++count;
    }
    return count;
}

inline std::size_t load_cache(const std::filesystem::path& path, MemoCache& cache) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw std::runtime_error("load_cache: cannot open " + path.string());
    return load_cache(in, cache);
}

}  // namespace psi
