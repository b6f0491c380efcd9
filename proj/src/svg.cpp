#include "patchdroso/svg.hpp"

#include <cstdio>
#include <fstream>

#include "patchdroso/errors.hpp"

namespace droso {

namespace {

constexpr double kWidth = 640.0;
constexpr double kHeight = 480.0;
constexpr double kLeft = 70.0;
constexpr double kRight = 610.0;
constexpr double kTop = 50.0;
constexpr double kBottom = 420.0;

double px(double recall) { return kLeft + recall * (kRight - kLeft); }
double py(double precision) { return kBottom - precision * (kBottom - kTop); }

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

}  // namespace

void write_pr_curve_svg(const std::vector<PrPoint>& points, double auc_value,
                        const std::string& title, const std::string& path) {
    std::ofstream out(path);
    if (!out)
        throw IoError("cannot write SVG: " + path);

    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth
        << "\" height=\"" << kHeight << "\" viewBox=\"0 0 " << kWidth << " "
        << kHeight << "\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out << "<text x=\"" << (kWidth / 2) << "\" y=\"28\" text-anchor=\"middle\" "
           "font-family=\"sans-serif\" font-size=\"18\">" << title << "</text>\n";

    // grid and tick labels at 0.2 steps
    for (int i = 0; i <= 5; ++i) {
        const double v = i / 5.0;
        out << "<line x1=\"" << px(v) << "\" y1=\"" << kTop << "\" x2=\"" << px(v)
            << "\" y2=\"" << kBottom << "\" stroke=\"#dddddd\"/>\n";
        out << "<line x1=\"" << kLeft << "\" y1=\"" << py(v) << "\" x2=\"" << kRight
            << "\" y2=\"" << py(v) << "\" stroke=\"#dddddd\"/>\n";
        out << "<text x=\"" << px(v) << "\" y=\"" << (kBottom + 20)
            << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">"
            << num(v) << "</text>\n";
        out << "<text x=\"" << (kLeft - 10) << "\" y=\"" << (py(v) + 4)
            << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"12\">"
            << num(v) << "</text>\n";
    }
    out << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\""
        << (kRight - kLeft) << "\" height=\"" << (kBottom - kTop)
        << "\" fill=\"none\" stroke=\"black\"/>\n";
    out << "<text x=\"" << ((kLeft + kRight) / 2) << "\" y=\"" << (kBottom + 45)
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"14\">"
           "Recall</text>\n";
    out << "<text x=\"22\" y=\"" << ((kTop + kBottom) / 2)
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"14\" "
           "transform=\"rotate(-90 22 " << ((kTop + kBottom) / 2)
        << ")\">Precision</text>\n";

    if (!points.empty()) {
        out << "<polyline fill=\"none\" stroke=\"#c0392b\" stroke-width=\"2\" points=\"";
        out << px(0.0) << ',' << py(points.front().precision) << ' ';
        for (const PrPoint& p : points)
            out << px(p.recall) << ',' << py(p.precision) << ' ';
        out << "\"/>\n";
    }

    out << "<rect x=\"" << (kRight - 150) << "\" y=\"" << (kTop + 10)
        << "\" width=\"140\" height=\"28\" fill=\"white\" stroke=\"black\"/>\n";
    out << "<line x1=\"" << (kRight - 142) << "\" y1=\"" << (kTop + 24) << "\" x2=\""
        << (kRight - 118) << "\" y2=\"" << (kTop + 24)
        << "\" stroke=\"#c0392b\" stroke-width=\"2\"/>\n";
    char auc_text[48];
    std::snprintf(auc_text, sizeof(auc_text), "AUC = %.4f", auc_value);
    out << "<text x=\"" << (kRight - 112) << "\" y=\"" << (kTop + 28)
        << "\" font-family=\"sans-serif\" font-size=\"13\">" << auc_text
        << "</text>\n";
    out << "</svg>\n";
}

}  // namespace droso
