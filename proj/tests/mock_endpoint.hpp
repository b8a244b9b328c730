#pragma once

// A local chat-completions endpoint for tests. It reconstructs the puzzle from
// whatever the request carries (markdown text or an SVG image), solves it, and
// answers through a pluggable policy.

#include <openssl/evp.h>

#include <atomic>
#include <chrono>
#include <functional>
#include <mutex>
#include <optional>
#include <regex>
#include <set>
#include <string>
#include <thread>

#include "httplib.h"
#include "crosspuzzle/json_io.hpp"
#include "crosspuzzle/render.hpp"
#include "crosspuzzle/solver.hpp"

namespace mock {

using crosspuzzle::json;

struct Solved {
  std::vector<crosspuzzle::Value> answers;
  std::vector<int> hops;
};

using Policy = std::function<std::string(const Solved&)>;

inline std::string gold_echo(const Solved& s) {
  std::string out = "Working through the grid.\n<answer>";
  for (std::size_t i = 0; i < s.answers.size(); ++i) out += (i ? " " : "") + std::to_string(s.answers[i]);
  return out + "</answer>";
}

// Right on depth-1 cells, off by one everywhere else.
inline std::string one_hop_only(const Solved& s) {
  std::string out = "<answer>";
  for (std::size_t i = 0; i < s.answers.size(); ++i)
    out += (i ? " " : "") + std::to_string(s.hops[i] == 1 ? s.answers[i] : s.answers[i] + 1);
  return out + "</answer>";
}

inline std::string base64_decode(const std::string& in) {
  std::string out(in.size() / 4 * 3 + 3, '\0');
  const int n = EVP_DecodeBlock(reinterpret_cast<unsigned char*>(out.data()),
                                reinterpret_cast<const unsigned char*>(in.data()), static_cast<int>(in.size()));
  if (n < 0) throw std::runtime_error("bad base64");
  std::size_t len = static_cast<std::size_t>(n);
  for (auto it = in.rbegin(); it != in.rend() && *it == '='; ++it) --len;
  out.resize(len);
  return out;
}

inline crosspuzzle::Grid grid_from_svg(const std::string& svg) {
  std::smatch m;
  const std::string doc = svg;
  static const std::regex kRows(R"re(data-rows="(\d+)")re"), kCols(R"re(data-cols="(\d+)")re");
  std::regex_search(doc, m, kRows);
  const int rows = std::stoi(m[1]);
  std::regex_search(doc, m, kCols);
  const int cols = std::stoi(m[1]);
  std::vector<std::vector<std::string>> cells(static_cast<std::size_t>(rows), std::vector<std::string>(cols));
  for (const auto& g : crosspuzzle::read_svg_glyphs(svg)) cells[g.cell.row][g.cell.col] = g.glyph;
  std::string md;
  for (const auto& row : cells) {
    md += "|";
    for (const auto& c : row) md += " " + c + " |";
    md += "\n";
  }
  return crosspuzzle::parse_markdown(md);
}

// Prefers the markdown text part; falls back to the image.
inline crosspuzzle::Grid grid_from_request(const json& body) {
  std::optional<crosspuzzle::Grid> from_image;
  for (const auto& part : body.at("messages").at(0).at("content")) {
    if (part.at("type") == "text") {
      const std::string text = part.at("text");
      if (text.starts_with("|")) return crosspuzzle::parse_markdown(text);
    } else if (part.at("type") == "image_url") {
      const std::string url = part.at("image_url").at("url");
      const auto comma = url.find(',');
      from_image = grid_from_svg(base64_decode(url.substr(comma + 1)));
    }
  }
  if (!from_image) throw std::runtime_error("request carries no puzzle");
  return *from_image;
}

inline Solved solve_request(const json& body) {
  const crosspuzzle::Grid g = grid_from_request(body);
  const auto d = crosspuzzle::deduce(g);
  Solved s;
  for (auto t : crosspuzzle::target_order(g)) s.answers.push_back(d.trace.answer_grid.at(t).value);
  s.hops = crosspuzzle::ordered_hops(g, d.hops);
  return s;
}

class Endpoint {
 public:
  explicit Endpoint(Policy policy = gold_echo, std::chrono::milliseconds delay = std::chrono::milliseconds(0))
      : policy_(std::move(policy)), delay_(delay) {
    server_.Post("/v1/chat/completions", [this](const httplib::Request& req, httplib::Response& res) {
      const int now = ++in_flight_;
      for (int seen = max_in_flight_.load(); now > seen && !max_in_flight_.compare_exchange_weak(seen, now);) {
      }
      ++requests_;
      handle(req, res);
      --in_flight_;
    });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~Endpoint() {
    server_.stop();
    thread_.join();
  }

  std::string base_url() const { return "http://127.0.0.1:" + std::to_string(port_); }
  int requests() const { return requests_; }
  int max_in_flight() const { return max_in_flight_; }

  // Requests whose puzzle has this many targets get an HTTP 500.
  void fail_when_targets(std::size_t n) { fail_targets_ = n; }
  // The first `n` requests fail with 503 before the endpoint recovers.
  void fail_first(int n) { fail_first_ = n; }

  std::vector<json> bodies() const {
    std::lock_guard lock(mu_);
    return bodies_;
  }
  std::vector<std::string> auth_headers() const {
    std::lock_guard lock(mu_);
    return auth_;
  }

 private:
  void handle(const httplib::Request& req, httplib::Response& res) {
    if (delay_.count() > 0) std::this_thread::sleep_for(delay_);
    json body;
    try {
      body = json::parse(req.body);
      std::lock_guard lock(mu_);
      bodies_.push_back(body);
      auth_.push_back(req.get_header_value("Authorization"));
    } catch (...) {
      res.status = 400;
      return;
    }
    if (fail_first_.fetch_sub(1) > 0) {
      res.status = 503;
      return;
    }
    try {
      const Solved s = solve_request(body);
      if (fail_targets_ && s.answers.size() == fail_targets_) {
        res.status = 500;
        res.set_content("{\"error\":\"boom\"}", "application/json");
        return;
      }
      const json message = {{"role", "assistant"}, {"content", policy_(s)}};
      const json choice = {{"index", 0}, {"message", message}};
      const json reply = {{"id", "mock"}, {"choices", json::array({choice})}};
      res.set_content(reply.dump(), "application/json");
    } catch (const std::exception& e) {
      res.status = 422;
      res.set_content(e.what(), "text/plain");
    }
  }

  Policy policy_;
  std::chrono::milliseconds delay_;
  httplib::Server server_;
  std::thread thread_;
  int port_ = 0;
  std::atomic<int> requests_{0}, in_flight_{0}, max_in_flight_{0}, fail_first_{0};
  std::size_t fail_targets_ = 0;
  mutable std::mutex mu_;
  std::vector<json> bodies_;
  std::vector<std::string> auth_;
};

}  // namespace mock
