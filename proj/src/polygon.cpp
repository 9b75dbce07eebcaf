#include "ppdm/polygon.hpp"

#include <algorithm>
#include <deque>
#include <limits>

namespace ppdm {

PlaneFrame::PlaneFrame(const Plane& p) : origin(p.anyPoint()), n(p.normal) {
  u = anyOrthogonal(n);
  v = cross(n, u);
}

double signedArea2d(const std::vector<Vec2>& loop) {
  double s = 0.0;
  for (size_t i = 0, n = loop.size(); i < n; ++i) s += cross2(loop[i], loop[(i + 1) % n]);
  return 0.5 * s;
}

Vec3 vectorArea(const std::vector<Point3>& loop) {
  Vec3 s;
  for (size_t i = 0, n = loop.size(); i < n; ++i) s += cross(loop[i], loop[(i + 1) % n]);
  return s * 0.5;
}

double pointSegmentDistance2d(const Vec2& p, const Vec2& a, const Vec2& b) {
  Vec2 ab = b - a, ap = p - a;
  double len2 = ab.x * ab.x + ab.y * ab.y;
  double t = len2 > 0 ? std::clamp((ap.x * ab.x + ap.y * ab.y) / len2, 0.0, 1.0) : 0.0;
  double dx = a.x + ab.x * t - p.x, dy = a.y + ab.y * t - p.y;
  return std::sqrt(dx * dx + dy * dy);
}

double pointSegmentDistance(const Point3& p, const Point3& a, const Point3& b) {
  Vec3 ab = b - a;
  double len2 = dot(ab, ab);
  double t = len2 > 0 ? std::clamp(dot(p - a, ab) / len2, 0.0, 1.0) : 0.0;
  return distance(p, a + ab * t);
}

PointLocation locatePoint2d(const std::vector<std::vector<Vec2>>& loops, const Vec2& p, double tol) {
  for (const auto& loop : loops)
    for (size_t i = 0, n = loop.size(); i < n; ++i)
      if (pointSegmentDistance2d(p, loop[i], loop[(i + 1) % n]) <= tol) return PointLocation::kBoundary;
  bool inside = false;
  for (const auto& loop : loops) {
    for (size_t i = 0, n = loop.size(), j = n - 1; i < n; j = i++) {
      const Vec2& a = loop[i];
      const Vec2& b = loop[j];
      if ((a.y > p.y) != (b.y > p.y)) {
        double x = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
        if (p.x < x) inside = !inside;
      }
    }
  }
  return inside ? PointLocation::kInside : PointLocation::kOutside;
}

PointLocation locateOnFace(const PolygonWithHoles& poly, const Point3& p, double tol) {
  PlaneFrame frame(poly.plane);
  std::vector<std::vector<Vec2>> loops;
  for (const auto& l : poly.loops) {
    std::vector<Vec2> q;
    for (const auto& pt : l) q.push_back(frame.to2d(pt));
    loops.push_back(std::move(q));
  }
  return locatePoint2d(loops, frame.to2d(p), tol);
}

std::vector<Point3> clipConvex(const std::vector<Point3>& poly, const Plane& keepBelow, double tol) {
  std::vector<Point3> out;
  const size_t n = poly.size();
  if (n == 0) return out;
  std::vector<double> d(n);
  for (size_t i = 0; i < n; ++i) {
    d[i] = keepBelow.signedDistance(poly[i]);
    if (std::abs(d[i]) <= tol) d[i] = 0.0;
  }
  for (size_t i = 0; i < n; ++i) {
    size_t j = (i + 1) % n;
    if (d[i] <= 0) out.push_back(poly[i]);
    if ((d[i] < 0 && d[j] > 0) || (d[i] > 0 && d[j] < 0)) {
      double t = d[i] / (d[i] - d[j]);
      out.push_back(lerp(poly[i], poly[j], t));
    }
  }
  if (out.size() < 3) out.clear();
  return out;
}

// ---------------------------------------------------------------------------
// Ear clipping with hole elimination (after the well-known earcut scheme).

namespace {

struct Node {
  int i;
  double x, y;
  Node* prev = nullptr;
  Node* next = nullptr;
  bool steiner = false;
};

class EarClipper {
 public:
  std::vector<int> tris;

  Node* insertNode(int i, double x, double y, Node* last) {
    pool_.push_back(Node{i, x, y});
    Node* p = &pool_.back();
    if (!last) {
      p->prev = p;
      p->next = p;
    } else {
      p->next = last->next;
      p->prev = last;
      last->next->prev = p;
      last->next = p;
    }
    return p;
  }

  static void removeNode(Node* p) {
    p->next->prev = p->prev;
    p->prev->next = p->next;
  }

  static double area(const Node* p, const Node* q, const Node* r) {
    return (q->y - p->y) * (r->x - q->x) - (q->x - p->x) * (r->y - q->y);
  }
  static bool equals(const Node* a, const Node* b) { return a->x == b->x && a->y == b->y; }

  static bool pointInTriangle(double ax, double ay, double bx, double by, double cx, double cy, double px,
                              double py) {
    return (cx - px) * (ay - py) >= (ax - px) * (cy - py) && (ax - px) * (by - py) >= (bx - px) * (ay - py) &&
           (bx - px) * (cy - py) >= (cx - px) * (by - py);
  }

  Node* linkedList(const std::vector<Vec2>& pts, int base, bool ccw) {
    double s = 0;
    for (size_t i = 0, n = pts.size(), j = n - 1; i < n; j = i++)
      s += (pts[j].x - pts[i].x) * (pts[i].y + pts[j].y);
    Node* last = nullptr;
    if (ccw == (s > 0)) {
      for (size_t i = 0; i < pts.size(); ++i) last = insertNode(base + int(i), pts[i].x, pts[i].y, last);
    } else {
      for (size_t i = pts.size(); i-- > 0;) last = insertNode(base + int(i), pts[i].x, pts[i].y, last);
    }
    if (last && equals(last, last->next)) {
      removeNode(last);
      last = last->next;
    }
    return last;
  }

  Node* filterPoints(Node* start, Node* end = nullptr) {
    if (!start) return start;
    if (!end) end = start;
    Node* p = start;
    bool again;
    do {
      again = false;
      if (!p->steiner && (equals(p, p->next) || area(p->prev, p, p->next) == 0)) {
        removeNode(p);
        p = end = p->prev;
        if (p == p->next) break;
        again = true;
      } else {
        p = p->next;
      }
    } while (again || p != end);
    return end;
  }

  bool isEar(Node* ear) {
    Node *a = ear->prev, *b = ear, *c = ear->next;
    if (area(a, b, c) >= 0) return false;
    for (Node* p = c->next; p != a; p = p->next) {
      if (!(p->x == a->x && p->y == a->y) && pointInTriangle(a->x, a->y, b->x, b->y, c->x, c->y, p->x, p->y) &&
          area(p->prev, p, p->next) >= 0)
        return false;
    }
    return true;
  }

  static int sign(double v) { return (v > 0) - (v < 0); }
  static bool onSegment(const Node* p, const Node* q, const Node* r) {
    return q->x <= std::max(p->x, r->x) && q->x >= std::min(p->x, r->x) && q->y <= std::max(p->y, r->y) &&
           q->y >= std::min(p->y, r->y);
  }
  static bool intersects(const Node* p1, const Node* q1, const Node* p2, const Node* q2) {
    int o1 = sign(area(p1, q1, p2)), o2 = sign(area(p1, q1, q2));
    int o3 = sign(area(p2, q2, p1)), o4 = sign(area(p2, q2, q1));
    if (o1 != o2 && o3 != o4) return true;
    if (o1 == 0 && onSegment(p1, p2, q1)) return true;
    if (o2 == 0 && onSegment(p1, q2, q1)) return true;
    if (o3 == 0 && onSegment(p2, p1, q2)) return true;
    if (o4 == 0 && onSegment(p2, q1, q2)) return true;
    return false;
  }
  static bool intersectsPolygon(const Node* a, const Node* b) {
    const Node* p = a;
    do {
      if (p->i != a->i && p->next->i != a->i && p->i != b->i && p->next->i != b->i &&
          intersects(p, p->next, a, b))
        return true;
      p = p->next;
    } while (p != a);
    return false;
  }
  static bool locallyInside(const Node* a, const Node* b) {
    return area(a->prev, a, a->next) < 0 ? area(a, b, a->next) >= 0 && area(a, a->prev, b) >= 0
                                         : area(a, b, a->prev) < 0 || area(a, a->next, b) < 0;
  }
  static bool middleInside(const Node* a, const Node* b) {
    const Node* p = a;
    bool inside = false;
    double px = (a->x + b->x) / 2, py = (a->y + b->y) / 2;
    do {
      if (((p->y > py) != (p->next->y > py)) && p->next->y != p->y &&
          (px < (p->next->x - p->x) * (py - p->y) / (p->next->y - p->y) + p->x))
        inside = !inside;
      p = p->next;
    } while (p != a);
    return inside;
  }
  static bool isValidDiagonal(const Node* a, const Node* b) {
    return a->next->i != b->i && a->prev->i != b->i && !intersectsPolygon(a, b) &&
           ((locallyInside(a, b) && locallyInside(b, a) && middleInside(a, b) &&
             (area(a->prev, a, b->prev) != 0 || area(a, b->prev, b) != 0)) ||
            (equals(a, b) && area(a->prev, a, a->next) > 0 && area(b->prev, b, b->next) > 0));
  }

  Node* splitPolygon(Node* a, Node* b) {
    pool_.push_back(Node{a->i, a->x, a->y});
    Node* a2 = &pool_.back();
    pool_.push_back(Node{b->i, b->x, b->y});
    Node* b2 = &pool_.back();
    Node* an = a->next;
    Node* bp = b->prev;
    a->next = b;
    b->prev = a;
    a2->next = an;
    an->prev = a2;
    b2->next = a2;
    a2->prev = b2;
    bp->next = b2;
    b2->prev = bp;
    return b2;
  }

  Node* cureLocalIntersections(Node* start) {
    Node* p = start;
    do {
      Node* a = p->prev;
      Node* b = p->next->next;
      if (!equals(a, b) && intersects(a, p, p->next, b) && locallyInside(a, b) && locallyInside(b, a)) {
        tris.insert(tris.end(), {a->i, p->i, b->i});
        removeNode(p);
        removeNode(p->next);
        p = start = b;
      }
      p = p->next;
    } while (p != start);
    return filterPoints(p);
  }

  void splitEarcut(Node* start) {
    Node* a = start;
    do {
      Node* b = a->next->next;
      while (b != a->prev) {
        if (a->i != b->i && isValidDiagonal(a, b)) {
          Node* c = splitPolygon(a, b);
          a = filterPoints(a, a->next);
          c = filterPoints(c, c->next);
          earcutLinked(a, 0);
          earcutLinked(c, 0);
          return;
        }
        b = b->next;
      }
      a = a->next;
    } while (a != start);
  }

  void earcutLinked(Node* ear, int pass) {
    if (!ear) return;
    Node* stop = ear;
    while (ear->prev != ear->next) {
      Node* prev = ear->prev;
      Node* next = ear->next;
      if (isEar(ear)) {
        tris.insert(tris.end(), {prev->i, ear->i, next->i});
        removeNode(ear);
        ear = next->next;
        stop = next->next;
        continue;
      }
      ear = next;
      if (ear == stop) {
        if (pass == 0) {
          earcutLinked(filterPoints(ear), 1);
        } else if (pass == 1) {
          earcutLinked(cureLocalIntersections(filterPoints(ear)), 2);
        } else {
          splitEarcut(ear);
        }
        break;
      }
    }
  }

  static Node* getLeftmost(Node* start) {
    Node *p = start, *leftmost = start;
    do {
      if (p->x < leftmost->x || (p->x == leftmost->x && p->y < leftmost->y)) leftmost = p;
      p = p->next;
    } while (p != start);
    return leftmost;
  }

  static bool sectorContainsSector(const Node* m, const Node* p) {
    return area(m->prev, m, p->prev) < 0 && area(p->next, m, m->next) < 0;
  }

  static Node* findHoleBridge(Node* hole, Node* outer) {
    Node* p = outer;
    double hx = hole->x, hy = hole->y;
    double qx = -std::numeric_limits<double>::infinity();
    Node* m = nullptr;
    do {
      if (hy <= p->y && hy >= p->next->y && p->next->y != p->y) {
        double x = p->x + (hy - p->y) * (p->next->x - p->x) / (p->next->y - p->y);
        if (x <= hx && x > qx) {
          qx = x;
          m = p->x < p->next->x ? p : p->next;
          if (x == hx) return m;
        }
      }
      p = p->next;
    } while (p != outer);
    if (!m) return nullptr;
    Node* stop = m;
    double mx = m->x, my = m->y, tanMin = std::numeric_limits<double>::infinity();
    p = m;
    do {
      if (hx >= p->x && p->x >= mx && hx != p->x &&
          pointInTriangle(hy < my ? hx : qx, hy, mx, my, hy < my ? qx : hx, hy, p->x, p->y)) {
        double tan = std::abs(hy - p->y) / (hx - p->x);
        if (locallyInside(p, hole) &&
            (tan < tanMin || (tan == tanMin && (p->x > m->x || (p->x == m->x && sectorContainsSector(m, p)))))) {
          m = p;
          tanMin = tan;
        }
      }
      p = p->next;
    } while (p != stop);
    return m;
  }

  Node* eliminateHole(Node* hole, Node* outer) {
    Node* bridge = findHoleBridge(hole, outer);
    if (!bridge) return outer;
    Node* bridgeReverse = splitPolygon(bridge, hole);
    filterPoints(bridgeReverse, bridgeReverse->next);
    return filterPoints(bridge, bridge->next);
  }

  void run(const std::vector<std::vector<Vec2>>& loops) {
    if (loops.empty() || loops[0].size() < 3) return;
    int base = 0;
    Node* outer = linkedList(loops[0], base, true);
    base += int(loops[0].size());
    if (!outer || outer->next == outer->prev) return;
    std::vector<Node*> queue;
    for (size_t h = 1; h < loops.size(); ++h) {
      Node* list = linkedList(loops[h], base, false);
      base += int(loops[h].size());
      if (!list) continue;
      if (list == list->next) list->steiner = true;
      queue.push_back(getLeftmost(list));
    }
    std::sort(queue.begin(), queue.end(), [](const Node* a, const Node* b) {
      return a->x != b->x ? a->x < b->x : a->y < b->y;
    });
    for (Node* h : queue) outer = eliminateHole(h, outer);
    earcutLinked(outer, 0);
  }

 private:
  std::deque<Node> pool_;
};

}  // namespace

std::vector<std::array<int, 3>> triangulate(const std::vector<std::vector<Vec2>>& loops) {
  EarClipper clipper;
  clipper.run(loops);

  std::vector<Vec2> pts;
  for (const auto& l : loops) pts.insert(pts.end(), l.begin(), l.end());
  double extent = 0;
  for (const auto& p : pts) extent = std::max({extent, std::abs(p.x), std::abs(p.y)});
  const double tol = 1e-12 * (1.0 + extent);

  // Re-insert boundary points that the clipper dropped as collinear, so every
  // loop vertex is a mesh vertex.
  std::vector<std::array<int, 3>> work, out;
  for (size_t k = 0; k + 2 < clipper.tris.size(); k += 3)
    work.push_back({clipper.tris[k], clipper.tris[k + 1], clipper.tris[k + 2]});
  while (!work.empty()) {
    auto tri = work.back();
    work.pop_back();
    bool split = false;
    for (int e = 0; e < 3 && !split; ++e) {
      int a = tri[e], b = tri[(e + 1) % 3], c = tri[(e + 2) % 3];
      const Vec2 &pa = pts[a], &pb = pts[b];
      Vec2 ab = pb - pa;
      double len2 = ab.x * ab.x + ab.y * ab.y;
      if (len2 == 0) continue;
      for (int q = 0; q < int(pts.size()); ++q) {
        if (q == a || q == b || q == c) continue;
        const Vec2& pq = pts[q];
        if ((pq.x == pa.x && pq.y == pa.y) || (pq.x == pb.x && pq.y == pb.y)) continue;
        Vec2 ap = pq - pa;
        double t = (ap.x * ab.x + ap.y * ab.y) / len2;
        if (t <= 0 || t >= 1) continue;
        if (std::abs(cross2(ab, ap)) / std::sqrt(len2) > tol) continue;
        work.push_back({a, q, c});
        work.push_back({q, b, c});
        split = true;
        break;
      }
    }
    if (!split) out.push_back(tri);
  }
  return out;
}

std::vector<std::array<Point3, 3>> triangulateFace(const PolygonWithHoles& poly) {
  PlaneFrame frame(poly.plane);
  std::vector<std::vector<Vec2>> loops;
  std::vector<Point3> all;
  for (const auto& l : poly.loops) {
    std::vector<Vec2> q;
    for (const auto& p : l) {
      q.push_back(frame.to2d(p));
      all.push_back(p);
    }
    loops.push_back(std::move(q));
  }
  std::vector<std::array<Point3, 3>> out;
  for (const auto& t : triangulate(loops)) {
    std::array<Point3, 3> tri{all[t[0]], all[t[1]], all[t[2]]};
    // Keep orientation consistent with the plane normal.
    if (dot(cross(tri[1] - tri[0], tri[2] - tri[0]), poly.plane.normal) < 0) std::swap(tri[1], tri[2]);
    out.push_back(tri);
  }
  return out;
}

}  // namespace ppdm
