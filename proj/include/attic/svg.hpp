#pragma once

#include <string>
#include <vector>

namespace attic::svg {

// Minimal SVG emitter for the offline result plots. Every plot is a derived
// view of an emitted CSV; nothing is plot-only.
class Canvas {
public:
    Canvas(double width, double height);

    void line(double x1, double y1, double x2, double y2, const std::string& stroke,
              double width = 1.0);
    void polyline(const std::vector<std::pair<double, double>>& points,
                  const std::string& stroke, double width = 1.0, double opacity = 1.0);
    void circle(double cx, double cy, double r, const std::string& fill, double opacity = 1.0);
    void rect(double x, double y, double w, double h, const std::string& fill,
              double opacity = 1.0);
    void cross(double cx, double cy, double half, const std::string& stroke, double width = 1.0);
    void text(double x, double y, const std::string& content, double size = 12.0,
              const std::string& anchor = "start");

    std::string finish() const;

private:
    double width_, height_;
    std::string body_;
};

// Maps data coordinates to canvas pixels with margins.
struct Frame {
    double x_min, x_max, y_min, y_max;
    double left = 50.0, right = 15.0, top = 15.0, bottom = 35.0;
    double width = 480.0, height = 360.0;
    bool log_x = false;

    double px(double x) const;
    double py(double y) const;
    void draw_axes(Canvas& canvas, const std::string& x_label,
                   const std::string& y_label) const;
};

}  // namespace attic::svg
