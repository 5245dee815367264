// llmsketch: trace generation, replay experiments, closed-form evaluators and
// Monte Carlo verifiers.
//
// Exit codes: 0 success, 2 configuration error, 3 input error.

#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "llmsketch/analysis.hpp"
#include "llmsketch/classifier.hpp"
#include "llmsketch/errors.hpp"
#include "llmsketch/experiment.hpp"
#include "llmsketch/monte_carlo.hpp"
#include "llmsketch/trace.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitInput = 3;

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw llms::InputError("cannot write " + path);
  out << text;
}

std::vector<uint8_t> parse_bits(const std::string& s) {
  std::vector<uint8_t> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item == "0" || item == "1")
      out.push_back(static_cast<uint8_t>(item[0] - '0'));
    else
      throw llms::ConfigError("label sequences are comma-separated 0/1 values, got '" + item + "'");
  }
  return out;
}

// Shared-vector files consumed by the trainer's conformance tests.
void write_vectors(const std::string& dir) {
  std::ostringstream tok;
  tok << "header_hex,flagged,tokens\n";
  const std::vector<std::string> headers = {
      "",
      "4500",
      "45000028000040004006000000000000",
      "450000281c4640004006b1e6c0a80001c0a800c7",
      "450000281c4640004006b1e6c0a80001c0a800c7d43101bb000003e80000000150180400abcd0000",
      "4500001c0001000040110000c0a80001c0a8000204d2003500080000ff",
      "600000000008114000000000000000000000000000000001",
  };
  for (const auto& hex : headers) {
    const auto t = llms::tokenize_header(llms::from_hex(hex));
    tok << hex << ',' << (t.flagged ? 1 : 0) << ',';
    for (size_t i = 0; i < t.ids.size(); ++i) tok << (i ? " " : "") << t.ids[i];
    tok << '\n';
  }
  write_text(dir + "/tokenize_vectors.csv", tok.str());

  std::ostringstream sl;
  sl << std::setprecision(17) << "n,T,a,label\n";
  for (double n : {1.0, 2.0, 5.0, 16.0, 32.0, 60.0, 63.0, 64.0, 65.0, 70.0, 128.0, 256.0, 1000.0,
                   100000.0})
    sl << n << ",64,2.298," << llms::soft_label(n, 64, 2.298) << '\n';
  for (double n : {1.0, 10.0, 100.0}) sl << n << ",10,1," << llms::soft_label(n, 10, 1) << '\n';
  write_text(dir + "/softlabel_vectors.csv", sl.str());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Two-tier flow measurement sketch with a pluggable flow classifier"};
  app.require_subcommand(1);

  // generate
  auto* gen = app.add_subcommand("generate", "Write a synthetic Zipf trace CSV");
  llms::ZipfParams zp;
  std::string gen_out;
  bool no_headers = false;
  gen->add_option("--alpha", zp.alpha, "Zipf exponent")->capture_default_str();
  gen->add_option("--flows", zp.num_flows, "Number of flows")->capture_default_str();
  gen->add_option("--packets", zp.num_packets, "Number of packets")->capture_default_str();
  gen->add_option("--seed", zp.seed, "Generator seed")->capture_default_str();
  gen->add_flag("--no-headers", no_headers, "Leave header_hex empty");
  gen->add_option("--out", gen_out, "Output CSV (default stdout)");

  // run
  auto* run = app.add_subcommand("run", "Replay a trace through the sketch and the baseline");
  std::string trace_path, mode = "size", backend = "oracle", predictions, remote, run_out,
                          hhh_out, memory_list = "100KB", are_universe = "true";
  double accuracy_A = 1.0, static_score = 0.0, heavy_ratio = -1;
  uint64_t seed = 1;
  unsigned fingerprint = 0, light_bits = 8, baseline_bits = 32;
  bool classify_resident = false;
  llms::ZipfParams run_zipf;
  run->add_option("--trace", trace_path, "Trace CSV (default: generated Zipf trace)");
  run->add_option("--memory", memory_list, "Comma-separated budgets, e.g. 50KB,100KB")
      ->capture_default_str();
  run->add_option("--mode", mode, "size | hh | hhh")->capture_default_str();
  run->add_option("--backend", backend, "oracle | noisy | static | file | remote")
      ->capture_default_str();
  run->add_option("--accuracy-A", accuracy_A, "Large-flow accuracy for the noisy oracle")
      ->capture_default_str();
  run->add_option("--static-score", static_score, "Score returned by the static backend");
  run->add_option("--predictions", predictions, "Prediction CSV for the file backend");
  run->add_option("--remote", remote, "host:port of a remote classifier");
  run->add_option("--seed", seed, "Seed for sketch hashing and trace generation")
      ->capture_default_str();
  run->add_option("--out", run_out, "Report JSON (default stdout)");
  run->add_option("--hhh-csv", hhh_out, "HHH rows CSV (hhh mode; one file per budget)");
  run->add_option("--fingerprint", fingerprint, "Fingerprint bits: 0, 16 or 32");
  run->add_option("--light-bits", light_bits, "Light counter width")->capture_default_str();
  run->add_option("--baseline-bits", baseline_bits, "Baseline Count-Min counter width")
      ->capture_default_str();
  run->add_option("--heavy-ratio", heavy_ratio, "Fraction of memory for the heavy part");
  run->add_flag("--classify-resident", classify_resident,
                "Reclassify resident flows and update their lock flags");
  run->add_option("--are-universe", are_universe, "hh mode ARE over 'true' or 'reported' HHs")
      ->capture_default_str();
  run->add_option("--alpha", run_zipf.alpha, "Zipf exponent when generating")->capture_default_str();
  run->add_option("--flows", run_zipf.num_flows, "Flows when generating")->capture_default_str();
  run->add_option("--packets", run_zipf.num_packets, "Packets when generating")
      ->capture_default_str();

  // ingest
  auto* ingest = app.add_subcommand("ingest", "Convert a packet dump to a trace CSV");
  std::string ingest_in, ingest_out;
  ingest->add_option("input", ingest_in, "Packet dump")->required();
  ingest->add_option("--out", ingest_out, "Output CSV (default stdout)");

  // analyze
  auto* analyze = app.add_subcommand("analyze", "Evaluate the closed-form accuracy results");
  llms::AnalysisInputs in;
  in.w_light = 1000;
  in.d_light = 3;
  in.n_light = 1000;
  analyze->add_option("--accuracy-A", in.accuracy_A)->capture_default_str();
  analyze->add_option("--w-light", in.w_light)->capture_default_str();
  analyze->add_option("--d-light", in.d_light)->capture_default_str();
  analyze->add_option("--n-light", in.n_light)->capture_default_str();
  analyze->add_option("--n-large", in.n_large)->capture_default_str();
  analyze->add_option("--total-packets", in.total_packets)->capture_default_str();
  analyze->add_option("--T", in.threshold_T)->capture_default_str();

  // mc
  auto* mc = app.add_subcommand("mc", "Monte Carlo verifiers");
  std::string mc_kind = "lock", labels = "1,1,0,1";
  uint64_t trials = 100000, mc_seed = 1;
  size_t mc_w = 2048, mc_d = 3, mc_n = 2000, mc_seeds = 20;
  bool serial = false;
  mc->add_option("--kind", mc_kind, "lock | cms | coco")->capture_default_str();
  mc->add_option("--labels", labels, "lock: label sequence; coco: key-id sequence")
      ->capture_default_str();
  mc->add_option("--trials", trials)->capture_default_str();
  mc->add_option("--seed", mc_seed)->capture_default_str();
  mc->add_option("--w", mc_w, "cms: width")->capture_default_str();
  mc->add_option("--d", mc_d, "cms: depth")->capture_default_str();
  mc->add_option("--n", mc_n, "cms: flows")->capture_default_str();
  mc->add_option("--seeds", mc_seeds, "cms: independent sketches")->capture_default_str();
  mc->add_flag("--serial", serial, "Use the serial reference kernels");

  auto* vectors = app.add_subcommand("vectors", "Write shared tokenizer/soft-label test vectors");
  std::string vectors_dir = ".";
  vectors->add_option("--out", vectors_dir, "Output directory")->capture_default_str();
  vectors->group("");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitConfig;
  }

  try {
    if (*gen) {
      zp.with_headers = !no_headers;
      std::ostringstream out;
      llms::write_trace_csv(llms::generate_zipf(zp), out);
      write_text(gen_out, out.str());
    } else if (*run) {
      llms::ExperimentSpec spec;
      if (!trace_path.empty()) spec.trace_path = trace_path;
      run_zipf.seed = seed;
      spec.zipf = run_zipf;
      std::stringstream ms(memory_list);
      std::string item;
      while (std::getline(ms, item, ','))
        if (!item.empty()) spec.budgets.push_back(llms::parse_memory(item));
      spec.mode = llms::parse_mode(mode);
      spec.backend.kind = llms::parse_backend(backend);
      spec.backend.accuracy_A = accuracy_A;
      spec.backend.static_score = static_score;
      spec.backend.predictions = predictions;
      spec.backend.remote = remote;
      spec.cfg.seed = seed;
      spec.cfg.fingerprint_bits = fingerprint;
      spec.cfg.light_counter_bits = light_bits;
      spec.cfg.classify_resident = classify_resident;
      if (heavy_ratio >= 0) {
        spec.cfg.heavy_ratio = heavy_ratio;
        spec.heavy_ratio_overridden = true;
      }
      spec.baseline_counter_bits = baseline_bits;
      if (are_universe == "true")
        spec.hh_are_universe = llms::AreUniverse::true_hh;
      else if (are_universe == "reported")
        spec.hh_are_universe = llms::AreUniverse::reported_hh;
      else
        throw llms::ConfigError("--are-universe must be 'true' or 'reported'");
      const auto report = llms::run_experiment(spec);
      write_text(run_out, report.dump(2) + "\n");
      if (!hhh_out.empty()) {
        const auto& runs = report["runs"];
        for (size_t i = 0; i < runs.size(); ++i) {
          std::string path = hhh_out;
          if (runs.size() > 1) path += "." + std::to_string(runs[i]["memory_bytes"].get<size_t>());
          write_text(path, llms::hhh_csv(runs[i]));
        }
      }
    } else if (*ingest) {
      const auto res = llms::ingest_pcapish(ingest_in);
      std::ostringstream out;
      llms::write_trace_csv(res.trace, out);
      write_text(ingest_out, out.str());
      std::cerr << "ingested " << res.trace.rows.size() << " packets, skipped " << res.skipped
                << '\n';
    } else if (*analyze) {
      const auto eb = llms::error_bound(in);
      nlohmann::json j{{"p_cms", llms::p_cms(in.w_light, in.d_light, std::max(in.n_light, 1.0))},
                       {"p_llms", llms::p_llms(in)},
                       {"epsilon", eb.epsilon},
                       {"delta", eb.delta},
                       {"light_mass_bound", eb.light_mass_bound}};
      std::cout << j.dump(2) << '\n';
    } else if (*mc) {
      const auto exec = serial ? llms::Exec::serial : llms::Exec::parallel;
      nlohmann::json j{{"kind", mc_kind}};
      if (mc_kind == "lock") {
        const auto seq = parse_bits(labels);
        double mean = 0;
        for (auto y : seq) mean += y;
        j["mean_final_lock"] = llms::lock_flag_mc(seq, trials, mc_seed, exec);
        j["mean_labels"] = seq.empty() ? 0.0 : mean / static_cast<double>(seq.size());
        j["trials"] = trials;
      } else if (mc_kind == "cms") {
        const auto r = llms::cms_exact_fraction(mc_w, mc_d, mc_n, mc_seeds, mc_seed, exec);
        j["measured"] = r.mean_fraction;
        j["p_cms"] = llms::p_cms(static_cast<double>(mc_w), static_cast<double>(mc_d),
                                 static_cast<double>(mc_n));
        j["seeds"] = mc_seeds;
      } else if (mc_kind == "coco") {
        const auto seq = parse_bits(labels);
        const auto r = llms::coco_pair_mc(seq, trials, mc_seed, exec);
        j["truth"] = {r.truth[0], r.truth[1]};
        j["mean_estimate"] = {r.mean_estimate[0], r.mean_estimate[1]};
        j["trials"] = trials;
      } else {
        throw llms::ConfigError("--kind must be lock, cms or coco");
      }
      std::cout << j.dump(2) << '\n';
    } else if (*vectors) {
      write_vectors(vectors_dir);
    }
  } catch (const llms::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const llms::InputError& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return kExitInput;
  } catch (const llms::ClassifierError& e) {
    std::cerr << "classifier error: " << e.what() << '\n';
    return kExitInput;
  }
  return 0;
}
