#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>
#include <vector>

#include "thumbside/bridge_server.hpp"

namespace thumbside {

namespace fs = std::filesystem;

namespace {

std::optional<std::string> percent_decode(std::string_view in) {
  std::string out;
  out.reserve(in.size());
  for (std::size_t i = 0; i < in.size(); ++i) {
    if (in[i] != '%') {
      out.push_back(in[i]);
      continue;
    }
    if (i + 2 >= in.size() || !std::isxdigit(static_cast<unsigned char>(in[i + 1])) ||
        !std::isxdigit(static_cast<unsigned char>(in[i + 2]))) {
      return std::nullopt;
    }
    out.push_back(static_cast<char>(std::stoi(std::string(in.substr(i + 1, 2)), nullptr, 16)));
    i += 2;
  }
  return out;
}

std::string_view mime_type(const fs::path& p) {
  const std::string ext = p.extension().string();
  if (ext == ".html" || ext == ".htm") return "text/html; charset=utf-8";
  if (ext == ".js" || ext == ".mjs") return "text/javascript; charset=utf-8";
  if (ext == ".css") return "text/css; charset=utf-8";
  if (ext == ".json" || ext == ".map") return "application/json";
  if (ext == ".svg") return "image/svg+xml";
  if (ext == ".png") return "image/png";
  if (ext == ".jpg" || ext == ".jpeg") return "image/jpeg";
  if (ext == ".ico") return "image/x-icon";
  if (ext == ".wasm") return "application/wasm";
  if (ext == ".txt") return "text/plain; charset=utf-8";
  return "application/octet-stream";
}

StaticResponse not_found() {
  return {404, "text/plain", "", "not found\n"};
}

bool etag_matches(std::string_view header, std::string_view etag) {
  if (header.empty()) return false;
  std::size_t pos = 0;
  while (pos < header.size()) {
    std::size_t end = header.find(',', pos);
    if (end == std::string_view::npos) end = header.size();
    std::string_view tok = header.substr(pos, end - pos);
    while (!tok.empty() && tok.front() == ' ') tok.remove_prefix(1);
    while (!tok.empty() && tok.back() == ' ') tok.remove_suffix(1);
    if (tok.substr(0, 2) == "W/") tok.remove_prefix(2);
    if (tok == "*" || tok == etag) return true;
    pos = end + 1;
  }
  return false;
}

}  // namespace

StaticResponse serve_static(const fs::path& root, std::string_view target,
                            std::string_view if_none_match, bool head) {
  target = target.substr(0, target.find_first_of("?#"));
  auto decoded = percent_decode(target);
  if (!decoded || decoded->empty() || decoded->front() != '/') return not_found();

  fs::path rel;
  std::stringstream parts(decoded->substr(1));
  std::string seg;
  while (std::getline(parts, seg, '/')) {
    if (seg.empty()) continue;
    if (seg == "." || seg == ".." || seg.find('\\') != std::string::npos ||
        seg.find('\0') != std::string::npos) {
      return not_found();
    }
    rel /= seg;
  }

  std::error_code ec;
  const fs::path base = fs::canonical(root, ec);
  if (ec) return not_found();
  fs::path full = base / rel;
  if (fs::is_directory(full, ec)) full /= "index.html";
  full = fs::weakly_canonical(full, ec);
  if (ec) return not_found();
  // Symlinks must not lead outside the root either.
  auto [b, f] = std::mismatch(base.begin(), base.end(), full.begin(), full.end());
  if (b != base.end() || !fs::is_regular_file(full, ec)) return not_found();

  const auto size = fs::file_size(full, ec);
  if (ec) return not_found();
  const auto mtime = static_cast<unsigned long long>(
      fs::last_write_time(full, ec).time_since_epoch().count());
  std::ostringstream tag;
  tag << '"' << std::hex << size << '-' << mtime << '"';

  StaticResponse r;
  r.content_type = std::string(mime_type(full));
  r.etag = tag.str();
  if (etag_matches(if_none_match, r.etag)) {
    r.status = 304;
    return r;
  }
  r.status = 200;
  if (!head) {
    std::ifstream in(full, std::ios::binary);
    if (!in) return not_found();
    r.body.assign(std::istreambuf_iterator<char>(in), {});
  }
  return r;
}

bool wants_debug(std::string_view target) {
  const auto q = target.find('?');
  if (q == std::string_view::npos) return false;
  std::string_view query = target.substr(q + 1);
  while (!query.empty()) {
    const auto amp = query.find('&');
    const std::string_view kv = query.substr(0, amp);
    if (kv == "debug" || kv == "debug=1" || kv == "debug=true") return true;
    if (amp == std::string_view::npos) break;
    query.remove_prefix(amp + 1);
  }
  return false;
}

}  // namespace thumbside
