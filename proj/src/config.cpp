/**
 * Copyright 2026 The SVF Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "svf/config.hpp"

#include <cmath>
#include <functional>
#include <map>
#include <stdexcept>

#include "binary_io.hpp"
#include "json.hpp"
#include "svf/errors.hpp"

namespace svf {

namespace {

using json = nlohmann::ordered_json;

struct Field {
  std::string name;
  std::function<json(const RunConfig&)> get;
  std::function<void(RunConfig&, const json&)> set;
  std::function<json(const std::string&)> parse;
};

[[noreturn]] void bad_value(const std::string& key, const std::string& expected) {
  throw ConfigError(key, "config key '" + key + "': expected " + expected);
}

json parse_integer(const std::string& key, const std::string& text) {
  try {
    std::size_t used = 0;
    const long long v = std::stoll(text, &used);
    if (used == text.size()) return v;
  } catch (const std::exception&) {
  }
  bad_value(key, "an integer, got '" + text + "'");
}

json parse_real(const std::string& key, const std::string& text) {
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used == text.size() && std::isfinite(v)) return v;
  } catch (const std::exception&) {
  }
  bad_value(key, "a finite number, got '" + text + "'");
}

template <class Acc>
Field int_field(const std::string& name, Acc acc) {
  return {name, [acc](const RunConfig& c) { return json(acc(const_cast<RunConfig&>(c))); },
          [name, acc](RunConfig& c, const json& v) {
            if (!v.is_number_integer()) bad_value(name, "an integer");
            const auto x = v.get<long long>();
            if (x < -2147483648LL || x > 2147483647LL) bad_value(name, "a 32-bit integer");
            acc(c) = static_cast<int>(x);
          },
          [name](const std::string& s) { return parse_integer(name, s); }};
}

template <class Acc>
Field real_field(const std::string& name, Acc acc) {
  return {name, [acc](const RunConfig& c) { return json(acc(const_cast<RunConfig&>(c))); },
          [name, acc](RunConfig& c, const json& v) {
            if (!v.is_number()) bad_value(name, "a number");
            acc(c) = v.get<double>();
          },
          [name](const std::string& s) { return parse_real(name, s); }};
}

template <class Acc>
Field bool_field(const std::string& name, Acc acc) {
  return {name, [acc](const RunConfig& c) { return json(acc(const_cast<RunConfig&>(c))); },
          [name, acc](RunConfig& c, const json& v) {
            if (!v.is_boolean()) bad_value(name, "true or false");
            acc(c) = v.get<bool>();
          },
          [name](const std::string& s) -> json {
            if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
            if (s == "false" || s == "0" || s == "no" || s == "off") return false;
            bad_value(name, "true or false, got '" + s + "'");
          }};
}

template <class Acc>
Field string_field(const std::string& name, Acc acc) {
  return {name, [acc](const RunConfig& c) { return json(acc(const_cast<RunConfig&>(c))); },
          [name, acc](RunConfig& c, const json& v) {
            if (!v.is_string()) bad_value(name, "a string");
            acc(c) = v.get<std::string>();
          },
          [](const std::string& s) { return json(s); }};
}

template <class E, class Acc>
Field enum_field(const std::string& name, std::vector<std::pair<std::string, E>> names, Acc acc) {
  auto expected = [names] {
    std::string out = "one of";
    for (const auto& [n, e] : names) out += " " + n;
    return out;
  };
  return {name,
          [acc, names](const RunConfig& c) {
            const E cur = acc(const_cast<RunConfig&>(c));
            for (const auto& [n, e] : names) {
              if (e == cur) return json(n);
            }
            return json(nullptr);
          },
          [name, acc, names, expected](RunConfig& c, const json& v) {
            if (v.is_string()) {
              for (const auto& [n, e] : names) {
                if (n == v.get<std::string>()) {
                  acc(c) = e;
                  return;
                }
              }
            }
            bad_value(name, expected());
          },
          [](const std::string& s) { return json(s); }};
}

const std::vector<Field>& fields() {
  static const std::vector<Field> table = [] {
    std::vector<Field> f;
    // model
    f.push_back(int_field("frames", [](RunConfig& c) -> int& { return c.model.frames; }));
    f.push_back(int_field("height", [](RunConfig& c) -> int& { return c.model.height; }));
    f.push_back(int_field("width", [](RunConfig& c) -> int& { return c.model.width; }));
    f.push_back(int_field("channels", [](RunConfig& c) -> int& { return c.model.channels; }));
    f.push_back(int_field("patch", [](RunConfig& c) -> int& { return c.model.patch; }));
    f.push_back(int_field("dim", [](RunConfig& c) -> int& { return c.model.dim; }));
    f.push_back(int_field("heads", [](RunConfig& c) -> int& { return c.model.heads; }));
    f.push_back(int_field("blocks", [](RunConfig& c) -> int& { return c.model.blocks; }));
    f.push_back(int_field("n_classes", [](RunConfig& c) -> int& { return c.model.n_classes; }));
    f.push_back(real_field("drop_rate", [](RunConfig& c) -> double& { return c.model.drop_rate; }));
    // semi-supervised training
    f.push_back(real_field("delta", [](RunConfig& c) -> double& { return c.ssl.delta; }));
    f.push_back(real_field("gamma1", [](RunConfig& c) -> double& { return c.ssl.gamma1; }));
    f.push_back(real_field("gamma2", [](RunConfig& c) -> double& { return c.ssl.gamma2; }));
    f.push_back(real_field("ema_momentum", [](RunConfig& c) -> double& { return c.ssl.ema_momentum; }));
    f.push_back(real_field("alpha", [](RunConfig& c) -> double& { return c.ssl.alpha; }));
    f.push_back(int_field("B_l", [](RunConfig& c) -> int& { return c.ssl.B_l; }));
    f.push_back(int_field("B_u", [](RunConfig& c) -> int& { return c.ssl.B_u; }));
    f.push_back(int_field("epochs", [](RunConfig& c) -> int& { return c.ssl.epochs; }));
    f.push_back(real_field("base_lr", [](RunConfig& c) -> double& { return c.ssl.base_lr; }));
    f.push_back(Field{
        "lr_drop_epochs", [](const RunConfig& c) { return json(c.ssl.lr_drop_epochs); },
        [](RunConfig& c, const json& v) {
          if (!v.is_array()) bad_value("lr_drop_epochs", "an array of integers");
          std::vector<int> out;
          for (const auto& e : v) {
            if (!e.is_number_integer()) bad_value("lr_drop_epochs", "an array of integers");
            out.push_back(e.get<int>());
          }
          c.ssl.lr_drop_epochs = std::move(out);
        },
        [](const std::string& s) -> json {
          if (!s.empty() && s.front() == '[') {
            try {
              return json::parse(s);
            } catch (const json::exception&) {
              bad_value("lr_drop_epochs", "a list of integers");
            }
          }
          json arr = json::array();
          std::size_t start = 0;
          while (start < s.size()) {
            const auto comma = s.find(',', start);
            const auto end = comma == std::string::npos ? s.size() : comma;
            arr.push_back(parse_integer("lr_drop_epochs", s.substr(start, end - start)));
            start = end + 1;
          }
          return arr;
        }});
    f.push_back(real_field("sgd_momentum", [](RunConfig& c) -> double& { return c.ssl.sgd_momentum; }));
    f.push_back(real_field("weight_decay", [](RunConfig& c) -> double& { return c.ssl.weight_decay; }));
    f.push_back(enum_field<MixStrategy>("mask_strategy",
                                        {{"tube", MixStrategy::Tube},
                                         {"rand", MixStrategy::Rand},
                                         {"frame", MixStrategy::Frame},
                                         {"mixup", MixStrategy::Mixup},
                                         {"cutmix", MixStrategy::CutMix}},
                                        [](RunConfig& c) -> MixStrategy& { return c.ssl.mask_strategy; }));
    f.push_back(enum_field<TeacherMode>("teacher_mode", {{"ema", TeacherMode::Ema}, {"shared", TeacherMode::Shared}},
                                        [](RunConfig& c) -> TeacherMode& { return c.ssl.teacher_mode; }));
    f.push_back(bool_field("use_twaug", [](RunConfig& c) -> bool& { return c.ssl.use_twaug; }));
    f.push_back(bool_field("use_strong_spatial", [](RunConfig& c) -> bool& { return c.ssl.use_strong_spatial; }));
    f.push_back(bool_field("mix_q_gate", [](RunConfig& c) -> bool& { return c.ssl.mix_q_gate; }));
    f.push_back(enum_field<TeacherInput>("teacher_input", {{"weak", TeacherInput::Weak}, {"raw", TeacherInput::Raw}},
                                         [](RunConfig& c) -> TeacherInput& { return c.ssl.teacher_input; }));
    f.push_back(bool_field("per_sample_masks", [](RunConfig& c) -> bool& { return c.ssl.per_sample_masks; }));
    // run
    f.push_back(string_field("data", [](RunConfig& c) -> std::string& { return c.data; }));
    f.push_back(string_field("val_data", [](RunConfig& c) -> std::string& { return c.val_data; }));
    f.push_back(string_field("out_dir", [](RunConfig& c) -> std::string& { return c.out_dir; }));
    f.push_back(Field{"seed", [](const RunConfig& c) { return json(c.seed); },
                      [](RunConfig& c, const json& v) {
                        if (v.is_number_unsigned()) {
                          c.seed = v.get<std::uint64_t>();
                        } else if (v.is_number_integer() && v.get<long long>() >= 0) {
                          c.seed = static_cast<std::uint64_t>(v.get<long long>());
                        } else {
                          bad_value("seed", "a non-negative integer");
                        }
                      },
                      [](const std::string& s) -> json {
                        try {
                          std::size_t used = 0;
                          if (!s.empty() && s.front() != '-') {
                            const auto v = std::stoull(s, &used, 0);
                            if (used == s.size()) return v;
                          }
                        } catch (const std::exception&) {
                        }
                        bad_value("seed", "a non-negative integer, got '" + s + "'");
                      }});
    f.push_back(real_field("label_rate", [](RunConfig& c) -> double& { return c.label_rate; }));
    f.push_back(real_field("val_fraction", [](RunConfig& c) -> double& { return c.val_fraction; }));
    f.push_back(int_field("eval_clips", [](RunConfig& c) -> int& { return c.eval_clips; }));
    f.push_back(int_field("eval_crops", [](RunConfig& c) -> int& { return c.eval_crops; }));
    f.push_back(int_field("ckpt_every", [](RunConfig& c) -> int& { return c.ckpt_every; }));
    f.push_back(int_field("steps_per_epoch", [](RunConfig& c) -> int& { return c.steps_per_epoch; }));
    f.push_back(bool_field("eval_teacher", [](RunConfig& c) -> bool& { return c.eval_teacher; }));
    f.push_back(bool_field("wall_clock", [](RunConfig& c) -> bool& { return c.wall_clock; }));
    return f;
  }();
  return table;
}

const Field* find_field(const std::string& key) {
  for (const auto& f : fields()) {
    if (f.name == key) return &f;
  }
  return nullptr;
}

const Field& require_field(const std::string& key) {
  const Field* f = find_field(key);
  if (f == nullptr) throw ConfigError(key, "unknown config key '" + key + "'");
  return *f;
}

}  // namespace

void RunConfig::validate() const {
  model.validate();
  ssl.validate();
  auto fail = [](const std::string& key, const std::string& msg) {
    throw ConfigError(key, "config key '" + key + "': " + msg);
  };
  if (!(label_rate > 0.0 && label_rate <= 1.0)) fail("label_rate", "must lie in (0, 1]");
  if (!(val_fraction > 0.0 && val_fraction < 1.0)) fail("val_fraction", "must lie in (0, 1)");
  if (eval_clips < 1) fail("eval_clips", "must be >= 1");
  if (eval_crops < 1) fail("eval_crops", "must be >= 1");
  if (ckpt_every < 0) fail("ckpt_every", "must be >= 0");
  if (steps_per_epoch < 0) fail("steps_per_epoch", "must be >= 0");
}

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = [] {
    std::vector<std::string> out;
    for (const auto& f : fields()) out.push_back(f.name);
    return out;
  }();
  return keys;
}

bool is_config_key(const std::string& key) { return find_field(key) != nullptr; }

void apply_json(RunConfig& config, const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError("", std::string("config is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ConfigError("", "config must be a JSON object");
  // Check every key before touching the config so a bad file changes nothing.
  RunConfig staged = config;
  for (const auto& [key, value] : doc.items()) require_field(key).set(staged, value);
  config = std::move(staged);
}

void apply_json_file(RunConfig& config, const std::string& path) { apply_json(config, detail::read_file(path)); }

void set_config_value(RunConfig& config, const std::string& key, const std::string& value) {
  const Field& f = require_field(key);
  f.set(config, f.parse(value));
}

std::string to_json(const RunConfig& config) {
  json doc = json::object();
  for (const auto& f : fields()) doc[f.name] = f.get(config);
  return doc.dump(2) + "\n";
}

}  // namespace svf
