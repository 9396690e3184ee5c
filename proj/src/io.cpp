#include "lpfda/io.hpp"

#include <fstream>
#include <sstream>

#include "lpfda/errors.hpp"

namespace lpfda {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) out.push_back(cell);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

FunctionalSample read_curves_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);

    std::string line;
    if (!std::getline(in, line)) throw IoError(path + ": empty file");
    std::vector<std::string> header = split_csv_line(line);
    if (header.size() < 2 || header[0] != "x")
        throw IoError(path + ": expected header 'x,<x_1>,...,<x_N>'");

    std::vector<double> points(header.size() - 1);
    for (std::size_t j = 1; j < header.size(); ++j) points[j - 1] = std::stod(header[j]);

    std::vector<std::vector<double>> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<std::string> cells = split_csv_line(line);
        if (cells.size() != header.size())
            throw IoError(path + ": row '" + cells[0] + "' has wrong width");
        std::vector<double> row(cells.size() - 1);
        for (std::size_t j = 1; j < cells.size(); ++j) row[j - 1] = std::stod(cells[j]);
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw IoError(path + ": no curves");

    FunctionalSample sample;
    sample.grid = make_design_grid(std::move(points));
    sample.values.resize(static_cast<Eigen::Index>(rows.size()), sample.grid.size());
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (int j = 0; j < sample.grid.size(); ++j) sample.values(i, j) = rows[i][j];
    sample.validate();
    return sample;
}

namespace {

void write_number(std::ostream& out, double v) {
    char buf[32];
    snprintf(buf, sizeof buf, "%.17g", v);
    out << buf;
}

}  // namespace

void write_curves_csv(const FunctionalSample& sample, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path);
    out << "x";
    for (double x : sample.grid.points) {
        out << ',';
        write_number(out, x);
    }
    out << '\n';
    for (int i = 0; i < sample.n(); ++i) {
        out << "curve_" << (i + 1);
        for (int j = 0; j < sample.N(); ++j) {
            out << ',';
            write_number(out, sample.values(i, j));
        }
        out << '\n';
    }
    if (!out) throw IoError("write failed: " + path);
}

void write_estimate_csv(const std::vector<std::pair<double, double>>& curve,
                        const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path);
    out << "x,estimate\n";
    for (const auto& [x, v] : curve) {
        write_number(out, x);
        out << ',';
        write_number(out, v);
        out << '\n';
    }
    if (!out) throw IoError("write failed: " + path);
}

}  // namespace lpfda
