#include "siqa/dataset.hpp"

#include <algorithm>
#include <unordered_set>

#include "siqa/binio.hpp"
#include "siqa/errors.hpp"
#include "siqa/netpbm.hpp"
#include "siqa/rng.hpp"

namespace siqa {

namespace {

std::vector<std::string> split_csv_line(std::string_view line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      fields.emplace_back(line.substr(start));
      break;
    }
    fields.emplace_back(line.substr(start, comma - start));
    start = comma + 1;
  }
  return fields;
}

}  // namespace

std::vector<SampleRecord> load_manifest(std::string_view csv) {
  std::vector<SampleRecord> records;
  std::unordered_set<std::string> seen;
  std::size_t line_no = 0;
  std::size_t start = 0;
  bool header_done = false;
  while (start <= csv.size()) {
    std::size_t end = csv.find('\n', start);
    if (end == std::string_view::npos) end = csv.size();
    std::string_view line = csv.substr(start, end - start);
    start = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;

    if (!header_done) {
      if (line != "image,quality,split") {
        throw MalformedRow("manifest header must be image,quality,split");
      }
      header_done = true;
      continue;
    }

    const auto fields = split_csv_line(line);
    if (fields.size() != 3) {
      throw MalformedRow("line " + std::to_string(line_no) + ": bad arity");
    }
    const std::string& path = fields[0];
    if (path.empty()) {
      throw MalformedRow("line " + std::to_string(line_no) + ": empty path");
    }
    if (fields[1].size() != 1 || fields[1][0] < '0' || fields[1][0] > '2') {
      throw MalformedRow("line " + std::to_string(line_no) +
                         ": quality must be 0, 1 or 2");
    }
    if (fields[2] != "train" && fields[2] != "test") {
      throw MalformedRow("line " + std::to_string(line_no) +
                         ": split must be train or test");
    }
    if (!seen.insert(path).second) {
      throw DuplicatePath("duplicate image path " + path);
    }
    records.push_back(
        {path, static_cast<QualityLabel>(fields[1][0] - '0'), fields[2]});
  }
  if (!header_done) throw MalformedRow("empty manifest");
  return records;
}

std::string manifest_to_csv(const std::vector<SampleRecord>& records) {
  std::string out = "image,quality,split\n";
  for (const auto& r : records) {
    out += r.image_path;
    out += ',';
    out += static_cast<char>('0' + static_cast<int>(r.label));
    out += ',';
    out += r.split;
    out += '\n';
  }
  return out;
}

ChannelStack stack_channels(const RasterImage& img, const BinaryMask* ls,
                            const BinaryMask* ts, StackOrder order) {
  if (img.channels != 3) {
    throw WrongChannelCount("stack_channels expects an RGB image");
  }
  const bool needs_ls = order != StackOrder::rgb_ts;
  const bool needs_ts = order != StackOrder::rgb_ls;
  if (needs_ls && ls == nullptr) throw MissingMask("large-structure mask required");
  if (needs_ts && ts == nullptr) throw MissingMask("tiny-structure mask required");

  auto check_dims = [&](const BinaryMask* m) {
    if (m && (m->width != img.width || m->height != img.height)) {
      throw DimensionMismatch("stack_channels: mask/image size mismatch");
    }
  };
  check_dims(needs_ls ? ls : nullptr);
  check_dims(needs_ts ? ts : nullptr);

  ChannelStack stack;
  stack.width = img.width;
  stack.height = img.height;
  stack.order = order;
  stack.channels = stack_channel_count(order);
  stack.data.assign(stack.plane_size() * stack.channels, 0.0f);

  const std::size_t n = stack.plane_size();
  for (int c = 0; c < 3; ++c) {
    float* plane = stack.plane(c);
    for (std::size_t i = 0; i < n; ++i) {
      plane[i] = static_cast<float>(img.data[i * 3 + c]);
    }
  }
  int next = 3;
  if (needs_ls) {
    float* plane = stack.plane(next++);
    for (std::size_t i = 0; i < n; ++i) plane[i] = ls->data[i] ? 1.0f : 0.0f;
  }
  if (needs_ts) {
    float* plane = stack.plane(next++);
    for (std::size_t i = 0; i < n; ++i) plane[i] = ts->data[i] ? 1.0f : 0.0f;
  }
  return stack;
}

ChannelStack augment(const ChannelStack& stack, std::uint64_t seed,
                     double rotation_range_deg) {
  Rng rng(seed);
  const bool do_hflip = rng.coin();
  const bool do_vflip = rng.coin();
  const double angle = rng.uniform(-rotation_range_deg, rotation_range_deg);

  ChannelStack out = stack;
  const int w = stack.width, h = stack.height;
  std::vector<float> tmp(stack.plane_size());
  for (int c = 0; c < stack.channels; ++c) {
    float* plane = out.plane(c);
    if (do_hflip) {
      for (int y = 0; y < h; ++y) {
        std::reverse(plane + static_cast<std::size_t>(y) * w,
                     plane + static_cast<std::size_t>(y + 1) * w);
      }
    }
    if (do_vflip) {
      for (int y = 0; y < h / 2; ++y) {
        std::swap_ranges(plane + static_cast<std::size_t>(y) * w,
                         plane + static_cast<std::size_t>(y + 1) * w,
                         plane + static_cast<std::size_t>(h - 1 - y) * w);
      }
    }
    const Interp interp = c < 3 ? Interp::bilinear : Interp::nearest;
    detail::rotate_plane(plane, tmp.data(), w, h, angle, interp);
    std::copy(tmp.begin(), tmp.end(), plane);
  }
  return out;
}

// --- RSTK -------------------------------------------------------------------

namespace {
constexpr char kStackMagic[4] = {'R', 'S', 'T', 'K'};
constexpr std::uint16_t kStackVersion = 1;
}  // namespace

std::vector<std::uint8_t> encode_stack(const ChannelStack& stack) {
  std::vector<std::uint8_t> out;
  out.reserve(16 + stack.data.size() * 4);
  for (char c : kStackMagic) out.push_back(static_cast<std::uint8_t>(c));
  put_u16(out, kStackVersion);
  put_u32(out, static_cast<std::uint32_t>(stack.width));
  put_u32(out, static_cast<std::uint32_t>(stack.height));
  put_u8(out, static_cast<std::uint8_t>(stack.channels));
  put_u8(out, static_cast<std::uint8_t>(stack.order));
  for (float v : stack.data) put_f32(out, v);
  return out;
}

ChannelStack decode_stack(std::span<const std::uint8_t> bytes) {
  try {
    ByteReader reader(bytes);
    char magic[4];
    for (char& c : magic) c = static_cast<char>(reader.u8());
    if (!std::equal(magic, magic + 4, kStackMagic)) {
      throw CorruptStack("bad magic");
    }
    if (reader.u16() != kStackVersion) throw CorruptStack("bad version");
    ChannelStack stack;
    stack.width = static_cast<int>(reader.u32());
    stack.height = static_cast<int>(reader.u32());
    stack.channels = reader.u8();
    const std::uint8_t order = reader.u8();
    if (order > 2) throw CorruptStack("bad order tag");
    stack.order = static_cast<StackOrder>(order);
    if (stack.width <= 0 || stack.height <= 0 ||
        stack.channels != stack_channel_count(stack.order)) {
      throw CorruptStack("inconsistent geometry");
    }
    const std::size_t n = stack.plane_size() * stack.channels;
    if (reader.remaining() != n * 4) throw CorruptStack("bad payload length");
    stack.data.resize(n);
    for (std::size_t i = 0; i < n; ++i) stack.data[i] = reader.f32();
    return stack;
  } catch (const CorruptStack&) {
    throw;
  } catch (const CorruptData& e) {
    throw CorruptStack(e.what());
  }
}

void save_stack(const ChannelStack& stack, const std::filesystem::path& path) {
  const auto bytes = encode_stack(stack);
  write_file(path, std::span<const std::uint8_t>(bytes));
}

ChannelStack load_stack(const std::filesystem::path& path) {
  const auto bytes = read_file(path);
  return decode_stack(bytes);
}

}  // namespace siqa
