#include "mep/io.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

namespace mep {

using nlohmann::json;

namespace {

const char* app_name(App app) {
  switch (app) {
    case App::Ellipsoidal: return "ellipsoidal";
    case App::Baer: return "baer";
    case App::FourPoint: return "fourpoint";
    default: return "random";
  }
}

App app_from_name(const std::string& s) {
  if (s == "ellipsoidal") return App::Ellipsoidal;
  if (s == "baer") return App::Baer;
  if (s == "fourpoint") return App::FourPoint;
  if (s == "random") return App::RandomDiag;
  throw MepError("load_problem: unknown application tag '" + s + "'");
}

json matrix_to_json(const Matrix& m) {
  std::vector<double> re, im;
  re.reserve(m.size());
  im.reserve(m.size());
  for (Eigen::Index j = 0; j < m.cols(); ++j)
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      re.push_back(m(i, j).real());
      im.push_back(m(i, j).imag());
    }
  return json{{"rows", m.rows()}, {"cols", m.cols()}, {"re", re}, {"im", im}};
}

Matrix matrix_from_json(const json& j) {
  const Eigen::Index rows = j.at("rows"), cols = j.at("cols");
  const auto& re = j.at("re");
  const auto& im = j.at("im");
  if (static_cast<Eigen::Index>(re.size()) != rows * cols ||
      static_cast<Eigen::Index>(im.size()) != rows * cols)
    throw MepError("load_problem: matrix payload size mismatch");
  Matrix m(rows, cols);
  size_t k = 0;
  for (Eigen::Index jj = 0; jj < cols; ++jj)
    for (Eigen::Index i = 0; i < rows; ++i, ++k)
      m(i, jj) = Complex(re[k].get<double>(), im[k].get<double>());
  return m;
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

void save_problem(const ProblemFile& pf, const std::string& path) {
  json j;
  j["format"] = "mep3";
  j["app"] = app_name(pf.bvp.app);
  j["params"] = pf.bvp.params;
  const auto n = pf.bvp.problem.sizes();
  j["sizes"] = {n[0], n[1], n[2]};
  const char* names[4] = {"A", "B", "C", "D"};
  const std::array<Matrix, 3>* mats[4] = {&pf.bvp.problem.A, &pf.bvp.problem.B,
                                          &pf.bvp.problem.C, &pf.bvp.problem.D};
  for (int t = 0; t < 4; ++t) {
    json arr = json::array();
    for (int i = 0; i < 3; ++i) arr.push_back(matrix_to_json((*mats[t])[i]));
    j[names[t]] = std::move(arr);
  }
  json grids = json::array();
  for (const auto& g : pf.bvp.grids)
    grids.push_back(json{{"n", g.n}, {"a", g.a}, {"b", g.b}});
  j["grids"] = std::move(grids);
  j["kept"] = pf.bvp.kept;
  if (pf.oracle) {
    json o = json::array();
    for (const auto& v : *pf.oracle)
      o.push_back({v.lambda.real(), v.lambda.imag(), v.mu.real(), v.mu.imag(),
                   v.eta.real(), v.eta.imag()});
    j["oracle"] = std::move(o);
  }
  std::ofstream out(path);
  if (!out) throw MepError("save_problem: cannot open '" + path + "'");
  out << j.dump();
  if (!out) throw MepError("save_problem: write failed for '" + path + "'");
}

ProblemFile load_problem(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw MepError("load_problem: cannot open '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw MepError(std::string("load_problem: invalid JSON: ") + e.what());
  }
  if (j.value("format", "") != "mep3")
    throw MepError("load_problem: not a mep3 container");

  ProblemFile pf;
  pf.bvp.app = app_from_name(j.at("app"));
  pf.bvp.params = j.at("params").get<std::map<std::string, double>>();
  const char* names[4] = {"A", "B", "C", "D"};
  std::array<Matrix, 3>* mats[4] = {&pf.bvp.problem.A, &pf.bvp.problem.B,
                                    &pf.bvp.problem.C, &pf.bvp.problem.D};
  for (int t = 0; t < 4; ++t)
    for (int i = 0; i < 3; ++i)
      (*mats[t])[i] = matrix_from_json(j.at(names[t]).at(i));
  const auto& grids = j.at("grids");
  for (int i = 0; i < 3; ++i) {
    const int gn = grids.at(i).at("n");
    if (gn >= 2)
      pf.bvp.grids[i] =
          cheb_grid(gn, grids.at(i).at("a"), grids.at(i).at("b"));
  }
  pf.bvp.kept = j.at("kept").get<std::array<std::vector<int>, 3>>();
  if (j.contains("oracle")) {
    std::vector<EigenTriple> o;
    for (const auto& row : j.at("oracle")) {
      EigenTriple v;
      v.lambda = Complex(row.at(0), row.at(1));
      v.mu = Complex(row.at(2), row.at(3));
      v.eta = Complex(row.at(4), row.at(5));
      o.push_back(v);
    }
    pf.oracle = std::move(o);
  }
  pf.bvp.problem.validate();
  return pf;
}

const char* const kCsvHeader =
    "idx,lambda_re,lambda_im,mu_re,mu_im,eta_re,eta_im,residual,j1,j2,j3,"
    "omega";

std::string format_csv(const std::vector<CsvRow>& rows) {
  std::ostringstream out;
  out << kCsvHeader << "\n";
  for (const auto& r : rows) {
    out << r.idx << ',' << fmt(r.value.lambda.real()) << ','
        << fmt(r.value.lambda.imag()) << ',' << fmt(r.value.mu.real()) << ','
        << fmt(r.value.mu.imag()) << ',' << fmt(r.value.eta.real()) << ','
        << fmt(r.value.eta.imag()) << ',' << fmt(r.residual) << ',';
    if (r.index)
      out << (*r.index)[0] << ',' << (*r.index)[1] << ',' << (*r.index)[2];
    else
      out << ",,";
    out << ',';
    if (r.omega) out << fmt(*r.omega);
    out << "\n";
  }
  return out.str();
}

void save_csv(const std::vector<CsvRow>& rows, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw MepError("save_csv: cannot open '" + path + "'");
  out << format_csv(rows);
  if (!out) throw MepError("save_csv: write failed for '" + path + "'");
}

std::vector<CsvRow> load_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw MepError("load_csv: cannot open '" + path + "'");
  std::string line;
  if (!std::getline(in, line)) throw MepError("load_csv: empty file");
  if (line.ends_with("\r")) line.pop_back();
  if (line != kCsvHeader) throw MepError("load_csv: schema mismatch");

  std::vector<CsvRow> rows;
  while (std::getline(in, line)) {
    if (line.ends_with("\r")) line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ls(line);
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    while (cells.size() < 12) cells.emplace_back();
    if (cells.size() != 12) throw MepError("load_csv: malformed row");

    CsvRow r;
    r.idx = std::stoi(cells[0]);
    r.value.lambda = Complex(std::stod(cells[1]), std::stod(cells[2]));
    r.value.mu = Complex(std::stod(cells[3]), std::stod(cells[4]));
    r.value.eta = Complex(std::stod(cells[5]), std::stod(cells[6]));
    r.residual = std::stod(cells[7]);
    if (!cells[8].empty() && !cells[9].empty() && !cells[10].empty())
      r.index = std::array<int, 3>{std::stoi(cells[8]), std::stoi(cells[9]),
                                   std::stoi(cells[10])};
    if (!cells[11].empty()) r.omega = std::stod(cells[11]);
    rows.push_back(std::move(r));
  }
  return rows;
}

std::vector<CsvRow> oracle_rows(const std::vector<EigenTriple>& spectrum) {
  std::vector<CsvRow> rows(spectrum.size());
  for (size_t i = 0; i < spectrum.size(); ++i) {
    rows[i].idx = static_cast<int>(i);
    rows[i].value = spectrum[i];
  }
  return rows;
}

CompareReport compare_spectra(const std::vector<CsvRow>& result,
                              const std::vector<CsvRow>& reference,
                              double tol) {
  if (reference.empty()) throw MepError("compare_spectra: empty reference");
  CompareReport rep;
  for (const auto& r : result) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& q : reference)
      best = std::min(best, r.value.dist_max(q.value));
    if (best <= tol) {
      ++rep.matched;
      rep.max_mismatch = std::max(rep.max_mismatch, best);
    } else {
      ++rep.unmatched;
      rep.unmatched_rows.push_back(r.idx);
    }
  }
  return rep;
}

void save_svg_scatter(const std::vector<SvgPoint>& points,
                      const std::string& x_label, const std::string& y_label,
                      const std::string& path) {
  const double w = 640, h = 480, margin = 56;
  double xmin = 0, xmax = 1, ymin = 0, ymax = 1;
  if (!points.empty()) {
    xmin = xmax = points[0].x;
    ymin = ymax = points[0].y;
    for (const auto& p : points) {
      xmin = std::min(xmin, p.x);
      xmax = std::max(xmax, p.x);
      ymin = std::min(ymin, p.y);
      ymax = std::max(ymax, p.y);
    }
  }
  if (xmax == xmin) xmax = xmin + 1;
  if (ymax == ymin) ymax = ymin + 1;
  auto sx = [&](double x) {
    return margin + (x - xmin) / (xmax - xmin) * (w - 2 * margin);
  };
  auto sy = [&](double y) {
    return h - margin - (y - ymin) / (ymax - ymin) * (h - 2 * margin);
  };

  std::ofstream out(path);
  if (!out) throw MepError("save_svg_scatter: cannot open '" + path + "'");
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w
      << "\" height=\"" << h << "\" viewBox=\"0 0 " << w << ' ' << h
      << "\">\n";
  out << "<rect width=\"" << w << "\" height=\"" << h
      << "\" fill=\"white\"/>\n";
  out << "<line x1=\"" << margin << "\" y1=\"" << h - margin << "\" x2=\""
      << w - margin << "\" y2=\"" << h - margin
      << "\" stroke=\"black\"/>\n";
  out << "<line x1=\"" << margin << "\" y1=\"" << margin << "\" x2=\""
      << margin << "\" y2=\"" << h - margin << "\" stroke=\"black\"/>\n";
  out << "<text x=\"" << w / 2 << "\" y=\"" << h - 16
      << "\" text-anchor=\"middle\" font-size=\"14\">" << x_label
      << "</text>\n";
  out << "<text x=\"16\" y=\"" << h / 2
      << "\" text-anchor=\"middle\" font-size=\"14\" transform=\"rotate(-90 "
         "16 "
      << h / 2 << ")\">" << y_label << "</text>\n";
  for (const auto& p : points)
    out << "<circle cx=\"" << sx(p.x) << "\" cy=\"" << sy(p.y)
        << "\" r=\"3\" fill=\"steelblue\" fill-opacity=\"0.7\"/>\n";
  out << "</svg>\n";
  if (!out) throw MepError("save_svg_scatter: write failed");
}

}  // namespace mep
