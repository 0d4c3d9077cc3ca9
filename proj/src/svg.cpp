#include "attic/svg.hpp"

#include <cmath>
#include <sstream>

#include "attic/io.hpp"

namespace attic::svg {

namespace {

std::string num(double v) { return io::format_double(std::round(v * 100.0) / 100.0); }

}  // namespace

Canvas::Canvas(double width, double height) : width_(width), height_(height) {}

void Canvas::line(double x1, double y1, double x2, double y2, const std::string& stroke,
                  double width) {
    body_ += "<line x1=\"" + num(x1) + "\" y1=\"" + num(y1) + "\" x2=\"" + num(x2) +
             "\" y2=\"" + num(y2) + "\" stroke=\"" + stroke + "\" stroke-width=\"" +
             num(width) + "\"/>\n";
}

void Canvas::polyline(const std::vector<std::pair<double, double>>& points,
                      const std::string& stroke, double width, double opacity) {
    body_ += "<polyline fill=\"none\" stroke=\"" + stroke + "\" stroke-width=\"" + num(width) +
             "\" stroke-opacity=\"" + num(opacity) + "\" points=\"";
    for (const auto& [x, y] : points) body_ += num(x) + "," + num(y) + " ";
    body_ += "\"/>\n";
}

void Canvas::circle(double cx, double cy, double r, const std::string& fill, double opacity) {
    body_ += "<circle cx=\"" + num(cx) + "\" cy=\"" + num(cy) + "\" r=\"" + num(r) +
             "\" fill=\"" + fill + "\" fill-opacity=\"" + num(opacity) + "\"/>\n";
}

void Canvas::rect(double x, double y, double w, double h, const std::string& fill,
                  double opacity) {
    body_ += "<rect x=\"" + num(x) + "\" y=\"" + num(y) + "\" width=\"" + num(w) +
             "\" height=\"" + num(h) + "\" fill=\"" + fill + "\" fill-opacity=\"" +
             num(opacity) + "\"/>\n";
}

void Canvas::cross(double cx, double cy, double half, const std::string& stroke, double width) {
    line(cx - half, cy - half, cx + half, cy + half, stroke, width);
    line(cx - half, cy + half, cx + half, cy - half, stroke, width);
}

void Canvas::text(double x, double y, const std::string& content, double size,
                  const std::string& anchor) {
    body_ += "<text x=\"" + num(x) + "\" y=\"" + num(y) + "\" font-size=\"" + num(size) +
             "\" font-family=\"sans-serif\" text-anchor=\"" + anchor + "\">" + content +
             "</text>\n";
}

std::string Canvas::finish() const {
    return "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(width_) + "\" height=\"" +
           num(height_) + "\" viewBox=\"0 0 " + num(width_) + " " + num(height_) + "\">\n" +
           "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n" + body_ + "</svg>\n";
}

double Frame::px(double x) const {
    double t;
    if (log_x) {
        t = (std::log10(x) - std::log10(x_min)) / (std::log10(x_max) - std::log10(x_min));
    } else {
        t = (x - x_min) / (x_max - x_min);
    }
    return left + t * (width - left - right);
}

double Frame::py(double y) const {
    double t = (y - y_min) / (y_max - y_min);
    return height - bottom - t * (height - top - bottom);
}

void Frame::draw_axes(Canvas& canvas, const std::string& x_label,
                      const std::string& y_label) const {
    canvas.line(left, height - bottom, width - right, height - bottom, "black");
    canvas.line(left, top, left, height - bottom, "black");
    canvas.text(left + (width - left - right) / 2.0, height - 8.0, x_label, 12.0, "middle");
    canvas.text(12.0, top - 2.0, y_label, 12.0, "start");
    canvas.text(left, height - bottom + 16.0, io::format_double(x_min), 10.0, "middle");
    canvas.text(width - right, height - bottom + 16.0, io::format_double(x_max), 10.0, "middle");
    canvas.text(left - 4.0, height - bottom, io::format_double(y_min), 10.0, "end");
    canvas.text(left - 4.0, top + 10.0, io::format_double(y_max), 10.0, "end");
}

}  // namespace attic::svg
