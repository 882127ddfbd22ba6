#include <CLI11.hpp>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "cfss/cfss.hpp"

namespace {

using namespace cfss;

enum ExitCode : int {
  exit_ok = 0,
  exit_usage = 2,
  exit_domain = 3,
  exit_capacity = 4,
  exit_insufficient = 5,
  exit_inconsistent = 6,
  exit_corrupt = 7,
  exit_internal = 8,
};

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::usage: return exit_usage;
    case ErrorKind::domain: return exit_domain;
    case ErrorKind::capacity: return exit_capacity;
    case ErrorKind::insufficient_shares: return exit_insufficient;
    case ErrorKind::inconsistent_shares: return exit_inconsistent;
    case ErrorKind::corrupt_side_info: return exit_corrupt;
    case ErrorKind::internal: return exit_internal;
  }
  return exit_internal;
}

struct Options {
  std::string key_hex;
  std::string data_key_hex;
  unsigned r = 0;
  unsigned n = 0;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::string format = "text";
  std::vector<std::string> inputs;
  std::string payload;
  std::string mode = "fake-share";
  std::string original;
  bool key_sweep = false;
  bool differential = false;
  unsigned workers = 0;
};

EncryptionKey parse_key(const std::string& hex, const char* flag) {
  if (hex.empty()) fail(ErrorKind::usage, std::string(flag) + " is required");
  return EncryptionKey::from_hex(hex);
}

EntropySource make_entropy(const Options& o) { return o.seed ? EntropySource(*o.seed) : EntropySource(); }

// Payload files are bytes; bits go most significant first.
BitString bytes_to_bits(const std::string& bytes) {
  BitString bits;
  bits.reserve(bytes.size() * 8);
  for (unsigned char ch : bytes) bits.append(ch, 8);
  return bits;
}

std::string bits_to_bytes(const BitString& bits) {
  std::string out((bits.size() + 7) / 8, '\0');
  for (std::size_t i = 0; i < bits.size(); ++i) {
    if (bits[i]) out[i / 8] = static_cast<char>(out[i / 8] | (0x80 >> (i % 8)));
  }
  return out;
}

std::vector<ShareContainer> read_containers(const std::vector<std::string>& paths) {
  std::vector<ShareContainer> out;
  out.reserve(paths.size());
  for (const auto& p : paths) out.push_back(read_container(p));
  return out;
}

bool is_container(const std::string& path) { return std::filesystem::path(path).extension() == ".cfss"; }

GrayImage read_any(const std::string& path) { return is_container(path) ? read_container(path).as_image() : read_pgm(path); }

using Rows = std::vector<std::pair<std::string, double>>;

void emit(const Options& o, const Rows& rows) {
  if (o.format == "csv") {
    std::vector<std::vector<std::string>> table;
    for (const auto& [k, v] : rows) table.push_back({k, std::to_string(v)});
    write_report_csv(std::cout, {"metric", "value"}, table);
  } else {
    write_report_text(std::cout, rows);
  }
}

int cmd_encrypt(const Options& o) {
  if (o.inputs.size() != 1) fail(ErrorKind::usage, "encrypt takes exactly one image");
  if (o.r == 0 || o.n == 0) fail(ErrorKind::usage, "--r and --n are required");
  if (o.r > o.n) fail(ErrorKind::usage, "--r must not exceed --n");
  const auto key = parse_key(o.key_hex, "--key");
  const GrayImage image = read_pgm(o.inputs.front());
  EntropySource entropy = make_entropy(o);
  const auto containers = owner_encrypt(image, key, o.r, o.n, entropy);
  const std::filesystem::path dir = o.out.empty() ? "." : o.out;
  std::filesystem::create_directories(dir);
  for (const auto& c : containers) {
    const auto path = dir / ("share_" + std::to_string(c.identity) + ".cfss");
    write_container(path.string(), c);
    std::cout << path.string() << '\n';
  }
  return exit_ok;
}

int cmd_embed(const Options& o) {
  if (o.inputs.size() != 1) fail(ErrorKind::usage, "embed takes exactly one container");
  if (o.payload.empty()) fail(ErrorKind::usage, "--payload is required");
  if (o.out.empty()) fail(ErrorKind::usage, "--out is required");
  const auto data_key = parse_key(o.data_key_hex, "--data-key");
  const ShareContainer c = read_container(o.inputs.front());
  const ShareContainer marked = hider_embed(c, bytes_to_bits(read_file(o.payload)), data_key);
  write_container(o.out, marked);
  return exit_ok;
}

int cmd_extract(const Options& o) {
  if (o.inputs.size() != 1) fail(ErrorKind::usage, "extract takes exactly one container");
  if (o.out.empty()) fail(ErrorKind::usage, "--out is required");
  const auto data_key = parse_key(o.data_key_hex, "--data-key");
  write_file(o.out, bits_to_bytes(extract_data(read_container(o.inputs.front()), data_key)));
  return exit_ok;
}

int cmd_recover(const Options& o) {
  if (o.inputs.empty()) fail(ErrorKind::insufficient_shares, "no containers given");
  if (o.n == 0) fail(ErrorKind::usage, "--n is required");
  if (o.out.empty()) fail(ErrorKind::usage, "--out is required");
  const auto key = parse_key(o.key_hex, "--key");
  write_pgm(o.out, reconstruct(read_containers(o.inputs), key, o.n));
  return exit_ok;
}

int cmd_analyze(const Options& o) {
  if (o.key_sweep || o.differential) {
    if (o.inputs.size() != 1) fail(ErrorKind::usage, "the sweep and the differential test take one image");
    if (o.r == 0 || o.n == 0 || o.r > o.n) fail(ErrorKind::usage, "--r and --n are required, with r <= n");
    const auto key = parse_key(o.key_hex, "--key");
    const GrayImage image = read_pgm(o.inputs.front());
    const std::uint64_t seed = o.seed.value_or(0);
    if (o.key_sweep) {
      const auto sweep = key_sensitivity_sweep(image, key, o.r, o.n, seed, o.workers);
      std::vector<std::string> header{"bit"};
      for (unsigned s = 1; s <= o.n; ++s) header.push_back("nbcr_share_" + std::to_string(s));
      std::vector<std::vector<std::string>> rows;
      Rows text;
      for (const auto& flip : sweep) {
        std::vector<std::string> row{std::to_string(flip.bit)};
        for (unsigned s = 0; s < o.n; ++s) {
          row.push_back(std::to_string(flip.share_nbcr[s]));
          text.emplace_back("bit" + std::to_string(flip.bit) + ".share" + std::to_string(s + 1) + ".nbcr", flip.share_nbcr[s]);
        }
        rows.push_back(std::move(row));
      }
      if (o.format == "csv") {
        write_report_csv(std::cout, header, rows);
      } else {
        write_report_text(std::cout, text);
      }
    }
    if (o.differential) {
      // Flip the low bit of the centre pixel.
      const auto reports = differential_test(image, key, o.r, o.n, seed, image.size() / 2, 0);
      Rows rows;
      for (std::size_t s = 0; s < reports.size(); ++s) {
        const std::string p = "share" + std::to_string(s + 1) + ".";
        rows.emplace_back(p + "npcr", reports[s].npcr);
        rows.emplace_back(p + "uaci", reports[s].uaci);
        rows.emplace_back(p + "srcc", reports[s].srcc);
        rows.emplace_back(p + "krcc", reports[s].krcc);
      }
      emit(o, rows);
    }
    return exit_ok;
  }

  if (o.inputs.empty()) fail(ErrorKind::usage, "analyze needs at least one input");
  Rows rows;
  for (std::size_t i = 0; i < o.inputs.size(); ++i) {
    const std::string p = "input" + std::to_string(i + 1) + ".";
    const auto& path = o.inputs[i];
    const GrayImage img = read_any(path);
    rows.emplace_back(p + "entropy", shannon_entropy(img));
    if (is_container(path)) {
      const ShareContainer c = read_container(path);
      rows.emplace_back(p + "level", read_header(c).level);
      rows.emplace_back(p + "overhead_bits", static_cast<double>(read_header(c).overhead_bits()));
      rows.emplace_back(p + "capacity_bits", static_cast<double>(payload_capacity(c)));
      rows.emplace_back(p + "embedding_rate", embedding_rate(c));
    } else {
      const double pc = prediction_accuracy(img);
      rows.emplace_back(p + "prediction_accuracy", pc);
      rows.emplace_back(p + "level", optimal_level(pc));
    }
  }
  if (o.inputs.size() == 2) {
    const GrayImage a = read_any(o.inputs[0]);
    const GrayImage b = read_any(o.inputs[1]);
    const MetricReport m = compare(PixelSpan(a.pixels), PixelSpan(b.pixels));
    rows.emplace_back("pair.nbcr", m.nbcr);
    rows.emplace_back("pair.npcr", m.npcr);
    rows.emplace_back("pair.uaci", m.uaci);
    rows.emplace_back("pair.srcc", m.srcc);
    rows.emplace_back("pair.krcc", m.krcc);
  }
  emit(o, rows);
  return exit_ok;
}

int cmd_attack(const Options& o) {
  if (o.n == 0) fail(ErrorKind::usage, "--n is required");
  const auto key = parse_key(o.key_hex, "--key");
  const auto genuine = read_containers(o.inputs);
  GrayImage result;
  if (o.mode == "missing-share") {
    // The honest path: reconstruction with whatever was supplied. Fewer than
    // r containers end in the insufficient-shares exit code.
    result = reconstruct(genuine, key, o.n);
  } else if (o.mode == "fake-share") {
    EntropySource entropy = make_entropy(o);
    result = fake_share_attack(genuine, key, o.n, entropy);
  } else {
    fail(ErrorKind::usage, "unknown attack mode " + o.mode);
  }
  if (!o.out.empty()) write_pgm(o.out, result);
  Rows rows;
  rows.emplace_back("entropy", shannon_entropy(result));
  if (!o.original.empty()) {
    const GrayImage original = read_pgm(o.original);
    if (original.size() != result.size()) fail(ErrorKind::inconsistent_shares, "original and result differ in size");
    rows.emplace_back("nbcr_vs_original", nbcr(result, original));
  }
  emit(o, rows);
  return exit_ok;
}

}  // namespace

int main(int argc, char** argv) {
  Options o;
  CLI::App app{"Threshold secret sharing of grayscale images with reversible data hiding"};
  app.require_subcommand(1);
  app.add_option("--seed", o.seed, "Pin all non-keyed randomness")->check(CLI::NonNegativeNumber);
  app.add_option("--format", o.format, "Report format")->check(CLI::IsMember({"text", "csv"}));

  auto* encrypt = app.add_subcommand("encrypt", "Split an image into n share containers");
  encrypt->add_option("image", o.inputs, "P5 image")->required();
  encrypt->add_option("--key", o.key_hex, "Encryption key, 64 hex characters")->required();
  encrypt->add_option("--r", o.r, "Threshold")->required();
  encrypt->add_option("--n", o.n, "Number of shares")->required();
  encrypt->add_option("--out", o.out, "Output directory");

  auto* embed = app.add_subcommand("embed", "Embed a payload file into a container");
  embed->add_option("container", o.inputs, "Container file")->required();
  embed->add_option("--payload", o.payload, "Payload file")->required();
  embed->add_option("--data-key", o.data_key_hex, "Data-hiding key, 64 hex characters")->required();
  embed->add_option("--out", o.out, "Marked container")->required();

  auto* extract = app.add_subcommand("extract", "Extract the payload of a container");
  extract->add_option("container", o.inputs, "Container file")->required();
  extract->add_option("--data-key", o.data_key_hex, "Data-hiding key, 64 hex characters")->required();
  extract->add_option("--out", o.out, "Payload file")->required();

  auto* recover = app.add_subcommand("recover", "Rebuild the image from r or more containers");
  recover->add_option("containers", o.inputs, "Container files")->required();
  recover->add_option("--key", o.key_hex, "Encryption key, 64 hex characters")->required();
  recover->add_option("--n", o.n, "Number of shares issued")->required();
  recover->add_option("--out", o.out, "Output image")->required();

  auto* analyze = app.add_subcommand("analyze", "Entropy, pairwise metrics, key sweep and differential test");
  analyze->add_option("inputs", o.inputs, "Images or containers")->required();
  analyze->add_flag("--key-sweep", o.key_sweep, "NBCR for all 256 one-bit key flips");
  analyze->add_flag("--differential", o.differential, "Compare shares of two images one bit apart");
  analyze->add_option("--key", o.key_hex, "Encryption key, 64 hex characters");
  analyze->add_option("--r", o.r, "Threshold");
  analyze->add_option("--n", o.n, "Number of shares");
  analyze->add_option("--workers", o.workers, "Sweep threads, 0 for all cores");

  auto* attack = app.add_subcommand("attack", "Reconstruction without the full set of genuine shares");
  attack->add_option("containers", o.inputs, "Genuine container files")->required();
  attack->add_option("--mode", o.mode, "Attack mode")->check(CLI::IsMember({"missing-share", "fake-share"}));
  attack->add_option("--key", o.key_hex, "Encryption key, 64 hex characters")->required();
  attack->add_option("--n", o.n, "Number of shares issued")->required();
  attack->add_option("--original", o.original, "Original image for the NBCR report");
  attack->add_option("--out", o.out, "Output image");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? exit_ok : exit_usage;
  }

  try {
    if (*encrypt) return cmd_encrypt(o);
    if (*embed) return cmd_embed(o);
    if (*extract) return cmd_extract(o);
    if (*recover) return cmd_recover(o);
    if (*analyze) return cmd_analyze(o);
    if (*attack) return cmd_attack(o);
  } catch (const Error& e) {
    std::cerr << "cfss: " << e.what() << '\n';
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "cfss: " << e.what() << '\n';
    return exit_internal;
  }
  return exit_usage;
}
