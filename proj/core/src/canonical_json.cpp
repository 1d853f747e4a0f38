#include "ideaforge/canonical_json.hpp"

#include <charconv>
#include <cmath>

#include "ideaforge/error.hpp"

namespace ideaforge {

namespace {

void dump_string(const std::string& s, std::string& out) {
  // Same escaping as nlohmann's own dump.
  out += nlohmann::json(s).dump(-1, ' ', false, nlohmann::json::error_handler_t::replace);
}

void indent(std::string& out, int depth) { out.append(static_cast<std::size_t>(depth) * 2, ' '); }

void dump(const nlohmann::json& v, std::string& out, int depth) {
  using value_t = nlohmann::json::value_t;
  switch (v.type()) {
    case value_t::null:
      out += "null";
      break;
    case value_t::boolean:
      out += v.get<bool>() ? "true" : "false";
      break;
    case value_t::number_integer:
      out += std::to_string(v.get<std::int64_t>());
      break;
    case value_t::number_unsigned:
      out += std::to_string(v.get<std::uint64_t>());
      break;
    case value_t::number_float:
      out += format_number(v.get<double>());
      break;
    case value_t::string:
      dump_string(v.get_ref<const std::string&>(), out);
      break;
    case value_t::array: {
      if (v.empty()) {
        out += "[]";
        break;
      }
      out += "[\n";
      bool first = true;
      for (const auto& item : v) {
        if (!first) out += ",\n";
        first = false;
        indent(out, depth + 1);
        dump(item, out, depth + 1);
      }
      out += "\n";
      indent(out, depth);
      out += "]";
      break;
    }
    case value_t::object: {
      if (v.empty()) {
        out += "{}";
        break;
      }
      out += "{\n";
      bool first = true;
      // Object iteration is key-sorted (std::map storage).
      for (auto it = v.begin(); it != v.end(); ++it) {
        if (!first) out += ",\n";
        first = false;
        indent(out, depth + 1);
        dump_string(it.key(), out);
        out += ": ";
        dump(it.value(), out, depth + 1);
      }
      out += "\n";
      indent(out, depth);
      out += "}";
      break;
    }
    default:
      throw InternalError("canonical_dump: unsupported JSON value type");
  }
}

}  // namespace

std::string format_number(double value) {
  if (!std::isfinite(value)) throw InternalError("canonical_dump: non-finite number");
  if (value == 0.0) return "0";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, value, std::chars_format::general, 12);
  if (res.ec != std::errc{}) throw InternalError("canonical_dump: number formatting failed");
  return std::string(buf, res.ptr);
}

std::string canonical_dump(const nlohmann::json& value) {
  std::string out;
  dump(value, out, 0);
  out += "\n";
  return out;
}

}  // namespace ideaforge
