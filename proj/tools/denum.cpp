// denum: lossless log compressor built around numeric token parsing.
//
// Subcommands: compress, decompress, inspect, preprocess, preprocess-invert,
// bench. Run `denum --help` or `denum <cmd> --help` for flags.

#include <chrono>
#include <cstdint>
#include <cstdlib>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "denum/files.hpp"
#include "denum/pipeline.hpp"

namespace {

using denum::Bytes;
using denum::ByteView;
using denum::Config;

constexpr double kMb = 1e6;  // bench speeds use decimal megabytes

struct CommonFlags {
  uint64_t chunk_lines = 100000;
  unsigned threads = 4;
  std::string backend = "lzma";
  int level = -1;
  std::string patterns_path;
  bool no_numeric = false;
  bool no_string = false;
};

unsigned threads_from_env() {
  if (const char* env = std::getenv("DENUM_THREADS")) {
    char* end = nullptr;
    long v = std::strtol(env, &end, 10);
    if (end && *end == '\0' && v >= 1 && v <= 1024) return static_cast<unsigned>(v);
  }
  return 4;
}

void add_common_flags(CLI::App* cmd, CommonFlags& f, bool with_pipeline_knobs) {
  if (with_pipeline_knobs) {
    cmd->add_option("--chunk-lines", f.chunk_lines, "Lines per chunk")
        ->default_val(100000)
        ->check(CLI::PositiveNumber);
    cmd->add_option("--backend", f.backend, "Backend compressor: lzma, zlib, store")
        ->default_val("lzma");
    cmd->add_option("--level", f.level, "Backend compression level");
    cmd->add_flag("--no-numeric", f.no_numeric, "Skip the numeric token stage");
    cmd->add_flag("--no-string", f.no_string, "Store skeletons plainly, no dictionary-index");
  }
  cmd->add_option("--threads", f.threads, "Worker threads (env DENUM_THREADS)")
      ->default_val(threads_from_env())
      ->check(CLI::PositiveNumber);
  cmd->add_option("--patterns", f.patterns_path, "Pattern registry file");
}

Config make_config(const CommonFlags& f) {
  Config cfg;
  cfg.chunk_lines = f.chunk_lines;
  cfg.threads = f.threads;
  cfg.backend = f.backend;
  cfg.backend_level = f.level;
  cfg.no_numeric = f.no_numeric;
  cfg.no_string = f.no_string;
  if (!f.patterns_path.empty())
    cfg.registry = denum::PatternRegistry::parse(denum::read_file(f.patterns_path));
  return cfg;
}

std::string human_bytes(uint64_t n) {
  std::ostringstream os;
  if (n >= 10 * 1000 * 1000)
    os << std::fixed << std::setprecision(1) << static_cast<double>(n) / kMb << " MB";
  else
    os << n << " B";
  return os.str();
}

int cmd_compress(const std::string& in_path, const std::string& out_path,
                 const CommonFlags& flags) {
  Config cfg = make_config(flags);
  Bytes input = denum::read_file(in_path);
  auto out = denum::compress(input, cfg);
  denum::write_file_atomic(out_path, out.container);
  std::cerr << in_path << ": " << out.metrics.original_bytes << " -> "
            << out.metrics.compressed_bytes << " bytes, CR " << std::fixed
            << std::setprecision(3) << out.metrics.cr() << ", CS " << std::setprecision(3)
            << out.metrics.cs() / kMb << " MB/s ("
            << std::setprecision(3) << out.metrics.elapsed_seconds << " s)\n";
  return 0;
}

int cmd_decompress(const std::string& in_path, const std::string& out_path,
                   const CommonFlags& flags) {
  Config cfg = make_config(flags);
  Bytes container = denum::read_file(in_path);
  Bytes output = denum::decompress(container, cfg);
  denum::write_file_atomic(out_path, output);
  std::cerr << in_path << ": restored " << output.size() << " bytes\n";
  return 0;
}

int cmd_inspect(const std::string& in_path) {
  Bytes container = denum::read_file(in_path);
  denum::InspectInfo info = denum::container_inspect(container);
  std::cout << "container:          " << in_path << "\n"
            << "format version:     " << int(denum::kFormatVersion) << "\n"
            << "backend:            " << info.backend_name << " (level "
            << int(info.backend_level) << ")\n"
            << "registry:           fingerprint " << std::hex << info.fingerprint << std::dec
            << "\n"
            << "modes:              " << (info.no_numeric ? "no-numeric " : "")
            << (info.no_string ? "no-string " : "")
            << (!info.no_numeric && !info.no_string ? "full pipeline" : "") << "\n"
            << "total lines:        " << info.total_lines
            << (info.trailing_newline ? "" : " (no trailing newline)") << "\n"
            << "container bytes:    " << info.container_bytes << "\n"
            << "body bytes:         " << info.body_bytes << " (before backend)\n"
            << "chunks:             " << info.chunks.size() << "\n";
  for (size_t i = 0; i < info.chunks.size(); ++i) {
    const auto& c = info.chunks[i];
    std::cout << "  chunk " << i << ": " << c.lines << " lines, " << c.size
              << " bytes (dict " << c.dict_bytes << " / " << c.dict_entries
              << " entries, index " << c.index_bytes << ", groups " << c.group_bytes << ")\n";
  }
  std::cout << "tag groups:         " << info.tags.size() << "\n";
  for (const auto& [tag, stat] : info.tags) {
    double share = info.body_bytes
                       ? static_cast<double>(stat.payload_bytes) / info.body_bytes
                       : 0;
    std::cout << "  " << std::setw(5) << std::left << tag << std::right << " "
              << denum::strategy_name(stat.strategy) << ", " << stat.count << " values, "
              << stat.payload_bytes << " bytes (" << std::fixed << std::setprecision(3) << share
              << " of body)\n";
  }
  std::cout << "numeric byte share: " << std::fixed << std::setprecision(3)
            << info.numeric_byte_share() << "\n";
  return 0;
}

int cmd_preprocess(const std::string& in_path, const std::string& out_dir,
                   const CommonFlags& flags) {
  Config cfg = make_config(flags);
  Bytes input = denum::read_file(in_path);
  denum::PreprocessResult r = denum::preprocess(input, cfg);
  denum::preprocess_write_dir(out_dir, r);
  std::cerr << in_path << ": skeleton " << r.skeleton_text.size() << " bytes, "
            << r.group_files.size() << " tag group files -> " << out_dir << "\n";
  return 0;
}

int cmd_preprocess_invert(const std::string& in_dir, const std::string& out_path,
                          const CommonFlags& flags) {
  Config cfg = make_config(flags);
  denum::PreprocessResult r = denum::preprocess_read_dir(in_dir);
  Bytes output = denum::preprocess_invert(r, cfg);
  denum::write_file_atomic(out_path, output);
  std::cerr << in_dir << ": restored " << output.size() << " bytes\n";
  return 0;
}

struct BenchRow {
  std::string name;
  uint64_t original = 0;
  uint64_t denum_bytes = 0;
  uint64_t backend_bytes = 0;
  double denum_cr = 0;
  double backend_cr = 0;
  double denum_cs_mb = 0;
  double elapsed_s = 0;
  std::string error;
};

BenchRow bench_one(const std::string& name, ByteView input, const Config& cfg,
                   const denum::Backend& backend) {
  BenchRow row;
  row.name = name;
  row.original = input.size();
  auto out = denum::compress(input, cfg);
  row.denum_bytes = out.metrics.compressed_bytes;
  row.denum_cr = out.metrics.cr();
  row.denum_cs_mb = out.metrics.cs() / kMb;
  row.elapsed_s = out.metrics.elapsed_seconds;
  Bytes backend_only = backend.compress(input, cfg.backend_level);
  row.backend_bytes = backend_only.size();
  row.backend_cr =
      backend_only.empty() ? 0 : static_cast<double>(input.size()) / backend_only.size();
  return row;
}

void print_bench_table(const std::vector<BenchRow>& rows) {
  size_t name_w = 5;
  for (const auto& r : rows) name_w = std::max(name_w, r.name.size());
  std::cout << std::left << std::setw(static_cast<int>(name_w)) << "input" << std::right
            << std::setw(12) << "original" << std::setw(12) << "denum" << std::setw(12)
            << "backend" << std::setw(10) << "denum-CR" << std::setw(12) << "backend-CR"
            << std::setw(12) << "denum-MB/s" << std::setw(10) << "seconds" << "\n";
  for (const auto& r : rows) {
    if (!r.error.empty()) {
      std::cout << std::left << std::setw(static_cast<int>(name_w)) << r.name << std::right
                << "  ERROR: " << r.error << "\n";
      continue;
    }
    std::cout << std::left << std::setw(static_cast<int>(name_w)) << r.name << std::right
              << std::setw(12) << r.original << std::setw(12) << r.denum_bytes << std::setw(12)
              << r.backend_bytes << std::setw(10) << std::fixed << std::setprecision(3)
              << r.denum_cr << std::setw(12) << r.backend_cr << std::setw(12) << r.denum_cs_mb
              << std::setw(10) << r.elapsed_s << "\n";
  }
}

void write_bench_csv(const std::string& path, const std::vector<BenchRow>& rows) {
  Bytes csv = "input,original_bytes,denum_bytes,backend_bytes,denum_cr,backend_cr,"
              "denum_cs_mb_s,elapsed_s,error\n";
  for (const auto& r : rows) {
    std::ostringstream os;
    os << r.name << ',' << r.original << ',' << r.denum_bytes << ',' << r.backend_bytes << ','
       << std::setprecision(6) << std::fixed << r.denum_cr << ',' << r.backend_cr << ','
       << r.denum_cs_mb << ',' << r.elapsed_s << ',' << r.error << '\n';
    csv += os.str();
  }
  denum::write_file_atomic(path, csv);
}

int cmd_bench(const std::vector<std::string>& inputs, const CommonFlags& flags, bool ablation,
              const std::string& csv_path) {
  Config cfg = make_config(flags);
  const denum::Backend& backend = denum::backend_by_name(cfg.backend);
  std::vector<BenchRow> rows;
  bool any_failed = false;
  for (const auto& path : inputs) {
    std::string name = std::filesystem::path(path).filename().string();
    Bytes input;
    try {
      input = denum::read_file(path);
    } catch (const denum::Error& e) {
      BenchRow row;
      row.name = name;
      row.error = e.what();
      rows.push_back(row);
      any_failed = true;
      continue;
    }
    auto run = [&](const std::string& label, bool no_numeric, bool no_string) {
      Config c = cfg;
      c.no_numeric = no_numeric;
      c.no_string = no_string;
      try {
        rows.push_back(bench_one(label, input, c, backend));
      } catch (const denum::Error& e) {
        BenchRow row;
        row.name = label;
        row.error = e.what();
        rows.push_back(row);
        any_failed = true;
      }
    };
    run(name, cfg.no_numeric, cfg.no_string);
    if (ablation) {
      run(name + "#numeric-only", false, true);
      run(name + "#string-only", true, false);
    }
  }
  print_bench_table(rows);
  if (!csv_path.empty()) write_bench_csv(csv_path, rows);
  return any_failed ? 1 : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"denum: lossless log compressor with numeric token parsing"};
  app.require_subcommand(1);

  CommonFlags flags;
  std::string in_path, out_path, out_dir, in_dir, csv_path;
  std::vector<std::string> bench_inputs;
  bool ablation = false;

  auto* compress = app.add_subcommand("compress", "Compress a log file into a .dnm container");
  compress->add_option("input", in_path, "Input log file")->required();
  compress->add_option("output", out_path, "Output container")->required();
  add_common_flags(compress, flags, true);

  auto* decompress = app.add_subcommand("decompress", "Restore the original log file");
  decompress->add_option("input", in_path, "Input container")->required();
  decompress->add_option("output", out_path, "Output log file")->required();
  add_common_flags(decompress, flags, false);

  auto* inspect = app.add_subcommand("inspect", "Print manifest and per-tag statistics");
  inspect->add_option("input", in_path, "Input container")->required();

  auto* preprocess =
      app.add_subcommand("preprocess", "Emit skeleton + tag group files for another compressor");
  preprocess->add_option("input", in_path, "Input log file")->required();
  preprocess->add_option("outdir", out_dir, "Output directory")->required();
  add_common_flags(preprocess, flags, false);

  auto* invert = app.add_subcommand("preprocess-invert",
                                    "Rebuild the original log from a preprocess directory");
  invert->add_option("indir", in_dir, "Preprocess directory")->required();
  invert->add_option("output", out_path, "Output log file")->required();
  add_common_flags(invert, flags, false);

  auto* bench = app.add_subcommand("bench", "Compare against the backend alone; report CR/CS");
  bench->add_option("inputs", bench_inputs, "Input log files")->required()->expected(-1);
  bench->add_flag("--ablation", ablation, "Add numeric-only and string-only rows");
  bench->add_option("--csv", csv_path, "Also write the report as CSV");
  add_common_flags(bench, flags, true);

  CLI11_PARSE(app, argc, argv);

  try {
    if (app.got_subcommand(compress)) return cmd_compress(in_path, out_path, flags);
    if (app.got_subcommand(decompress)) return cmd_decompress(in_path, out_path, flags);
    if (app.got_subcommand(inspect)) return cmd_inspect(in_path);
    if (app.got_subcommand(preprocess)) return cmd_preprocess(in_path, out_dir, flags);
    if (app.got_subcommand(invert)) return cmd_preprocess_invert(in_dir, out_path, flags);
    if (app.got_subcommand(bench)) return cmd_bench(bench_inputs, flags, ablation, csv_path);
  } catch (const denum::Error& e) {
    std::cerr << "denum: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "denum: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
