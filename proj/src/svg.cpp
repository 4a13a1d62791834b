// Copyright (c) 2026, The primdraw Authors. All rights reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "primdraw/svg.hpp"

#include <cctype>
#include <charconv>
#include <map>
#include <optional>
#include <regex>
#include <sstream>
#include <variant>

namespace primdraw {

std::string format_number(double v) {
  if (v == 0.0) v = 0.0;  // drop the sign of -0
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

namespace {

std::string pt(const Point2& p) { return format_number(p.x()) + "," + format_number(p.y()); }

bool near(double a, double b, double tol) { return std::abs(a - b) <= tol; }

struct CircleParams {
  double cx, cy, r;
};

std::optional<CircleParams> exact_circle(const Eigen::Matrix2Xd& p, double tol) {
  const Point2 n = p.col(0), e = p.col(1), s = p.col(2), w = p.col(3);
  const double cx = (e.x() + w.x()) / 2.0;
  const double cy = w.y();
  const double r = (e.x() - w.x()) / 2.0;
  if (!(r > 0.0)) return std::nullopt;
  const double t = tol * std::max(1.0, r);
  if (!near(e.y(), cy, t) || !near(n.x(), cx, t) || !near(s.x(), cx, t) ||
      !near(n.y(), cy - r, t) || !near(s.y(), cy + r, t)) {
    return std::nullopt;
  }
  return CircleParams{cx, cy, r};
}

struct SemiParams {
  double cx, cy, r;
  bool upper;
};

std::optional<SemiParams> exact_semicircle(const Eigen::Matrix2Xd& p, double tol) {
  const Point2 a = p.col(0), apex = p.col(1), c = p.col(2);
  const double cx = (a.x() + c.x()) / 2.0;
  const double cy = a.y();
  const double r = (c.x() - a.x()) / 2.0;
  if (!(r > 0.0)) return std::nullopt;
  const double t = tol * std::max(1.0, r);
  if (!near(c.y(), cy, t) || !near(apex.x(), cx, t)) return std::nullopt;
  if (near(apex.y(), cy - r, t)) return SemiParams{cx, cy, r, true};
  if (near(apex.y(), cy + r, t)) return SemiParams{cx, cy, r, false};
  return std::nullopt;
}

std::string cubic_chain_path(const Primitive& prim, bool closed) {
  const auto chain = cubic_chain<double>(prim.kind(), prim.points);
  std::string d = "M " + pt(chain.front().p0);
  for (const auto& seg : chain) {
    d += " C " + pt(seg.h1) + " " + pt(seg.h2) + " " + pt(seg.p1);
  }
  if (closed) d += " Z";
  return d;
}

// Path-data tokenizer: single-letter commands and numbers.
class PathTokens {
 public:
  explicit PathTokens(const std::string& d) {
    std::size_t i = 0;
    while (i < d.size()) {
      const char ch = d[i];
      if (std::isspace(static_cast<unsigned char>(ch)) || ch == ',') {
        ++i;
      } else if (std::isalpha(static_cast<unsigned char>(ch)) && ch != 'e' && ch != 'E') {
        tokens_.emplace_back(ch);
        ++i;
      } else {
        double v = 0.0;
        const auto res = std::from_chars(d.data() + i, d.data() + d.size(), v);
        if (res.ec != std::errc()) {
          throw InputError("malformed number in path data at offset " + std::to_string(i));
        }
        tokens_.emplace_back(v);
        i = static_cast<std::size_t>(res.ptr - d.data());
      }
    }
  }

  bool done() const { return pos_ >= tokens_.size(); }

  bool peek_command(char c) const {
    return !done() && std::holds_alternative<char>(tokens_[pos_]) &&
           std::get<char>(tokens_[pos_]) == c;
  }

  bool peek_number() const { return !done() && std::holds_alternative<double>(tokens_[pos_]); }

  void expect(char c) {
    if (!peek_command(c)) throw InputError(std::string("expected path command '") + c + "'");
    ++pos_;
  }

  double number() {
    if (!peek_number()) throw InputError("expected a number in path data");
    return std::get<double>(tokens_[pos_++]);
  }

  Point2 point() {
    const double x = number();
    return Point2(x, number());
  }

 private:
  std::vector<std::variant<char, double>> tokens_;
  std::size_t pos_ = 0;
};

}  // namespace

bool is_exact_shape(const Primitive& prim, double tol) {
  switch (prim.kind()) {
    case PrimitiveKind::Line: return true;
    case PrimitiveKind::Circle: return exact_circle(prim.points, tol).has_value();
    case PrimitiveKind::SemiCircle: return exact_semicircle(prim.points, tol).has_value();
  }
  return false;
}

std::string svg_path(const Primitive& prim) {
  const double tol = 1e-9;
  switch (prim.kind()) {
    case PrimitiveKind::Line:
      return "M " + pt(prim.points.col(0)) + " L " + pt(prim.points.col(1));
    case PrimitiveKind::Circle: {
      if (const auto c = exact_circle(prim.points, tol)) {
        const std::string r = format_number(c->r);
        return "M " + format_number(c->cx - c->r) + "," + format_number(c->cy) + " a " + r + "," +
               r + " 0 1,1 " + format_number(2 * c->r) + ",0 a " + r + "," + r + " 0 1,1 " +
               format_number(-2 * c->r) + ",0";
      }
      return cubic_chain_path(prim, true);
    }
    case PrimitiveKind::SemiCircle: {
      if (const auto s = exact_semicircle(prim.points, tol)) {
        const std::string r = format_number(s->r);
        return "M " + format_number(s->cx - s->r) + "," + format_number(s->cy) + " a " + r + "," +
               r + " 0 1," + (s->upper ? "1 " : "0 ") + format_number(2 * s->r) + ",0";
      }
      return cubic_chain_path(prim, false);
    }
  }
  return {};
}

ParsedPath parse_svg_path(const std::string& d) {
  PathTokens tok(d);
  tok.expect('M');
  const Point2 start = tok.point();
  ParsedPath out;

  if (tok.peek_command('L')) {
    tok.expect('L');
    out.kind = PrimitiveKind::Line;
    out.points.resize(2, 2);
    out.points.col(0) = start;
    out.points.col(1) = tok.point();
  } else if (tok.peek_command('a')) {
    struct Arc {
      double r, sweep, dx, dy;
    };
    std::vector<Arc> arcs;
    while (tok.peek_command('a')) {
      tok.expect('a');
      const double rx = tok.number();
      const double ry = tok.number();
      tok.number();  // x-axis rotation
      tok.number();  // large-arc flag
      const double sweep = tok.number();
      const double dx = tok.number();
      const double dy = tok.number();
      if (rx != ry || dy != 0.0) throw InputError("only horizontal circular arcs are supported");
      arcs.push_back({rx, sweep, dx, dy});
    }
    const double r = arcs.front().r;
    const Point2 center(start.x() + r, start.y());
    if (arcs.size() == 2) {
      out.kind = PrimitiveKind::Circle;
      out.points = circle_points(center, r);
      out.points.col(3) = start;
    } else if (arcs.size() == 1) {
      out.kind = PrimitiveKind::SemiCircle;
      out.points = semicircle_points(center, r, arcs.front().sweep != 0.0);
      out.points.col(0) = start;
    } else {
      throw InputError("unexpected number of arc segments in path data");
    }
  } else if (tok.peek_command('C')) {
    std::vector<Point2> on_curve{start};
    while (tok.peek_command('C')) {
      tok.expect('C');
      tok.point();
      tok.point();
      on_curve.push_back(tok.point());
    }
    const bool closed = tok.peek_command('Z');
    if (closed) {
      tok.expect('Z');
      on_curve.pop_back();  // the chain returns to its first point
    }
    if (closed && on_curve.size() == 4) {
      out.kind = PrimitiveKind::Circle;
    } else if (!closed && on_curve.size() == 3) {
      out.kind = PrimitiveKind::SemiCircle;
    } else {
      throw InputError("cubic chain does not describe a circle or semicircle");
    }
    out.points.resize(2, static_cast<Eigen::Index>(on_curve.size()));
    for (std::size_t i = 0; i < on_curve.size(); ++i) out.points.col(i) = on_curve[i];
  } else {
    throw InputError("unsupported path data: '" + d + "'");
  }
  if (!tok.done()) throw InputError("trailing tokens in path data: '" + d + "'");
  return out;
}

std::string svg_document(const std::vector<SvgElement>& elements, const SvgDocumentStyle& style) {
  std::ostringstream os;
  const std::string w = std::to_string(style.width);
  const std::string h = std::to_string(style.height);
  os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
     << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << w
     << "\" height=\"" << h << "\" viewBox=\"0 0 " << w << " " << h << "\">\n"
     << "  <rect x=\"0\" y=\"0\" width=\"" << w << "\" height=\"" << h << "\" fill=\"white\"/>\n";
  for (const auto& e : elements) {
    os << "  <path id=\"p" << e.id << "\" class=\"" << to_string(e.kind) << "\" d=\"" << e.d
       << "\" fill=\"none\" stroke=\"" << e.stroke << "\" stroke-opacity=\""
       << format_number(e.opacity) << "\" stroke-width=\"" << format_number(style.stroke_width)
       << "\" stroke-linecap=\"round\" stroke-linejoin=\"round\"/>\n";
  }
  os << "</svg>\n";
  return os.str();
}

std::vector<ParsedElement> parse_svg_document(const std::string& text) {
  static const std::regex path_re(R"(<path\s+([^>]*?)/>)");
  static const std::regex attr_re(R"(([A-Za-z][\w-]*)="([^"]*)\")");
  std::vector<ParsedElement> out;
  for (auto it = std::sregex_iterator(text.begin(), text.end(), path_re);
       it != std::sregex_iterator(); ++it) {
    const std::string attrs = (*it)[1];
    std::map<std::string, std::string> kv;
    for (auto a = std::sregex_iterator(attrs.begin(), attrs.end(), attr_re);
         a != std::sregex_iterator(); ++a) {
      kv[(*a)[1]] = (*a)[2];
    }
    if (!kv.count("d")) throw InputError("path element without path data");
    ParsedElement e;
    e.path = parse_svg_path(kv["d"]);
    if (kv.count("stroke-opacity")) e.opacity = std::stod(kv["stroke-opacity"]);
    if (kv.count("stroke")) e.stroke = kv["stroke"];
    if (kv.count("id") && kv["id"].size() > 1 && kv["id"][0] == 'p') {
      e.id = std::stoi(kv["id"].substr(1));
    }
    out.push_back(std::move(e));
  }
  return out;
}

}  // namespace primdraw
