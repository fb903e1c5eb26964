// qrec: run measurement scenarios through the path engine and the
// dilation oracle.
//
//   qrec run 2w2f --regime=fbar_preserved --query "Ok=>Heads"
//   qrec run scenarios/wfs_case2.scn --format=json --out wfs2.json
//   qrec convert scenarios/double_slit.scn double_slit.json
//
// Exit status: 0 success, 1 usage, 2 parse/validation/query error,
// 3 engines disagree.

#include "qrec/dsl.hpp"
#include "qrec/library.hpp"
#include "qrec/report.hpp"
#include "qrec/scenario_json.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

namespace {

constexpr int kUsage = 1;
constexpr int kInputError = 2;
constexpr int kDisagreement = 3;

void emit(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(out_path);
  if (!out) throw std::runtime_error("cannot write '" + out_path + "'");
  out << text;
}

bool ends_with(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"quantum measurement records: path amplitudes and dilation oracle"};
  app.require_subcommand(1);

  qrec::RunOptions options;
  std::string engine = "both";
  std::string format = "table";
  std::string out_path;
  bool show_paths = false;
  auto* run = app.add_subcommand("run", "compute the outcome distribution of a scenario");
  run->add_option("source", options.source, "builtin name or .scn/.json file")->required();
  run->add_option("--regime", options.variant,
                  "variant of a builtin: 2w2f regime, wfs case1|case2, double_slit engaged|not_engaged");
  run->add_option("--engine", engine, "paths, oracle or both")
      ->check(CLI::IsMember({"paths", "oracle", "both"}, CLI::ignore_case));
  run->add_option("--format", format, "table, json or dot")
      ->check(CLI::IsMember({"table", "json", "dot"}, CLI::ignore_case));
  run->add_option("--query", options.queries, "implication such as \"Ok=>Heads\" or \"W:ok=>Fbar:heads\"");
  run->add_option("--out", out_path, "write the output here instead of stdout");
  run->add_flag("--show-paths", show_paths, "list every virtual path with its amplitude (table format)");

  std::string convert_in;
  std::string convert_out;
  auto* convert = app.add_subcommand("convert", "convert between .scn and .json scenario files");
  convert->add_option("input", convert_in, "builtin name or scenario file")->required();
  convert->add_option("output", convert_out, "target file; .json selects JSON, anything else .scn")
      ->required();

  auto* list = app.add_subcommand("list", "list builtin scenarios");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : kUsage;
  }

  try {
    if (*list) {
      for (const auto& b : qrec::builtins()) {
        std::cout << b.name;
        for (std::size_t k = 0; k < b.variants.size(); ++k)
          std::cout << (k == 0 ? "  [" : "|") << b.variants[k] << (k + 1 == b.variants.size() ? "]" : "");
        std::cout << "\n";
      }
      return 0;
    }
    if (*convert) {
      const auto s = qrec::load_scenario(convert_in);
      emit(ends_with(convert_out, ".json") ? qrec::to_json(s).dump(2) + "\n"
                                           : qrec::serialize_scenario(s),
           convert_out);
      return 0;
    }

    options.engine = *qrec::parse_engine(engine);
    const auto report = qrec::run(options);
    std::string text;
    switch (*qrec::parse_format(format)) {
      case qrec::Format::Table:
        text = qrec::render_table(report);
        if (show_paths) text += "\n" + qrec::render_paths(report.scenario);
        break;
      case qrec::Format::Json:
        text = qrec::render_json(report);
        break;
      case qrec::Format::Dot:
        text = qrec::render_dot(qrec::real_path_graph(report.distribution()), report.scenario.name);
        break;
    }
    emit(text, out_path);
    if (!report.engines_agree()) {
      std::cerr << "error: engines disagree by " << *report.delta << "\n";
      return kDisagreement;
    }
    return 0;
  } catch (const qrec::ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
  } catch (const qrec::ErasedRecordError& e) {
    std::cerr << "error: " << e.what() << "\n";
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
  }
  return kInputError;
}
