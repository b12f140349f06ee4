#include "mcdist/dss/data_model.hpp"

#include <algorithm>
#include <set>

#include "mcdist/dss/classes.hpp"
#include "mcdist/dss/rpn.hpp"

namespace mcdist::dss {

const DssValue* DssObject::find(const std::string& key) const {
    auto it = properties.find(key);
    return it == properties.end() ? nullptr : &it->second;
}

double DssObject::number(const std::string& key, double fallback) const {
    const DssValue* v = find(key);
    if (!v) return fallback;
    if (auto d = std::get_if<double>(v)) return *d;
    if (auto a = std::get_if<NumberArray>(v); a && !a->empty()) return a->front();
    if (auto s = std::get_if<std::string>(v)) return parse_number(*s);
    throw ParseError("property '" + key + "' of " + name + " is not a number");
}

std::string DssObject::text(const std::string& key, const std::string& fallback) const {
    const DssValue* v = find(key);
    if (!v) return fallback;
    if (auto s = std::get_if<std::string>(v)) return *s;
    if (auto b = std::get_if<BusSpec>(v)) return b->str();
    return format_value(*v);
}

std::optional<BusSpec> DssObject::bus(const std::string& key) const {
    const DssValue* v = find(key);
    if (!v) return std::nullopt;
    if (auto b = std::get_if<BusSpec>(v)) return *b;
    if (auto s = std::get_if<std::string>(v)) return BusSpec::parse(*s);
    throw ParseError("property '" + key + "' of " + name + " is not a bus");
}

std::optional<SymMatrix> DssObject::matrix(const std::string& key) const {
    const DssValue* v = find(key);
    if (!v) return std::nullopt;
    if (auto m = std::get_if<SymMatrix>(v)) return *m;
    throw ParseError("property '" + key + "' of " + name + " is not a matrix");
}

NumberArray DssObject::numbers(const std::string& key) const {
    const DssValue* v = find(key);
    if (!v) return {};
    if (auto a = std::get_if<NumberArray>(v)) return *a;
    if (auto d = std::get_if<double>(v)) return {*d};
    throw ParseError("property '" + key + "' of " + name + " is not a number array");
}

TextArray DssObject::texts(const std::string& key) const {
    const DssValue* v = find(key);
    if (!v) return {};
    if (auto a = std::get_if<TextArray>(v)) return *a;
    if (auto s = std::get_if<std::string>(v)) return {*s};
    throw ParseError("property '" + key + "' of " + name + " is not a text array");
}

const DssObject* DssDataModel::find(const std::string& object_class, const std::string& name) const {
    auto c = objects.find(object_class);
    if (c == objects.end()) return nullptr;
    auto o = c->second.find(to_lower(name));
    return o == c->second.end() ? nullptr : &o->second;
}

std::size_t DssDataModel::count(const std::string& object_class) const {
    auto c = objects.find(object_class);
    return c == objects.end() ? 0 : c->second.size();
}

namespace {

struct RawValue {
    std::string text;
    SourceLocation location;
};

struct RawObject {
    std::string name;
    std::map<std::string, RawValue> props;
    int active_winding = 1;
};

class Builder {
  public:
    DssDataModel run(const std::vector<DssStatement>& statements) {
        for (const auto& st : statements) apply(st);
        finish();
        return std::move(model_);
    }

  private:
    void apply(const DssStatement& st) {
        switch (st.verb) {
            case Verb::New: define(st); break;
            case Verb::Edit: edit(st); break;
            case Verb::Set: set_options(st); break;
            case Verb::Redirect:
                throw ParseError("'" + st.verb_text + "' needs file context; use parse_file", st.location);
            case Verb::Other:
                warn(st.location.str() + ": ignored command '" + st.verb_text + "'");
                break;
        }
    }

    static std::pair<std::string, std::string> target(const DssStatement& st) {
        if (st.object_class == "circuit") return {"vsource", "source"};
        return {st.object_class, st.object_name};
    }

    void define(const DssStatement& st) {
        auto [cls, name] = target(st);
        auto& bucket = raw_[cls];
        const std::string key = to_lower(name);
        if (bucket.count(key)) {
            throw ParseError(cls + "." + name + " is already defined", st.location);
        }
        if (st.object_class == "circuit") {
            if (model_.options.count("circuit")) throw ParseError("a second circuit is defined", st.location);
            model_.options["circuit"] = st.object_name;
        }
        RawObject& obj = bucket[key];
        obj.name = name;
        model_.source_order.emplace_back(cls, key);
        if (!find_class(cls) && !warned_classes_.count(cls)) {
            warned_classes_.insert(cls);
            warn(st.location.str() + ": unsupported class '" + cls + "' stored raw and not converted");
        }
        assign(cls, obj, st);
    }

    void edit(const DssStatement& st) {
        auto [cls, name] = target(st);
        auto bucket = raw_.find(cls);
        if (bucket == raw_.end() || !bucket->second.count(to_lower(name))) {
            throw ParseError("Edit of undefined object " + cls + "." + name, st.location);
        }
        assign(cls, bucket->second.at(to_lower(name)), st);
    }

    void assign(const std::string& cls, RawObject& obj, const DssStatement& st) {
        const ClassDef* def = find_class(cls);
        int next_index = 0;
        for (const auto& prop : st.properties) {
            std::string key;
            if (prop.positional()) {
                if (def) {
                    if (next_index >= static_cast<int>(def->properties.size())) {
                        throw ParseError("too many positional values for " + cls + "." + obj.name, st.location);
                    }
                    key = std::string(def->properties[static_cast<std::size_t>(next_index)].name);
                } else {
                    key = "arg" + std::to_string(next_index + 1);
                }
            } else if (def) {
                ResolvedKey r;
                try {
                    r = resolve_property(*def, prop.key);
                } catch (const ParseError& e) {
                    throw ParseError(e.what(), st.location);
                }
                key = r.name;
                if (!r.known) warn(st.location.str() + ": unknown property '" + key + "' on " + cls + "." + obj.name);
            } else {
                key = prop.key;
            }
            if (def) {
                int idx = def->index_of(key);
                next_index = idx >= 0 ? idx + 1 : next_index;
            } else {
                ++next_index;
            }
            store(cls, obj, key, prop.value, st.location);
        }
    }

    void store(const std::string& cls, RawObject& obj, const std::string& key, const std::string& value,
               const SourceLocation& loc) {
        if (key == "like") {
            const std::string ref = to_lower(strip_delimiters(value));
            auto& bucket = raw_[cls];
            auto it = bucket.find(ref);
            if (it == bucket.end() || &it->second == &obj) {
                throw ParseError("like=" + std::string(strip_delimiters(value)) + " does not name an earlier " + cls,
                                 loc);
            }
            for (const auto& [k, v] : it->second.props) obj.props[k] = v;
            return;
        }
        if (cls == "transformer") {
            if (key == "wdg") {
                double w = parse_number(value);
                if (w < 1 || w != static_cast<int>(w)) throw ParseError("bad winding index '" + value + "'", loc);
                obj.active_winding = static_cast<int>(w);
                return;
            }
            if (is_winding_property(key)) {
                obj.props[key + "#" + std::to_string(obj.active_winding)] = {value, loc};
                return;
            }
            if (auto scalar = winding_scalar_name(key); !scalar.empty()) {
                auto items = split_items(strip_delimiters(value));
                for (std::size_t k = 0; k < items.size(); ++k) {
                    obj.props[std::string(scalar) + "#" + std::to_string(k + 1)] = {items[k], loc};
                }
                return;
            }
        }
        obj.props[key] = {value, loc};
    }

    void set_options(const DssStatement& st) {
        int positional = 0;
        for (const auto& prop : st.properties) {
            std::string key = prop.positional() ? "arg" + std::to_string(++positional) : prop.key;
            ValueKind kind = ValueKind::Text;
            if (key == "voltagebases") kind = ValueKind::NumberArray;
            else if (key == "basefrequency" || key == "defaultbasefrequency") kind = ValueKind::Number;
            try {
                model_.options[key] = parse_value(kind, prop.value, 0);
            } catch (const ParseError& e) {
                throw ParseError(e.what(), st.location);
            }
        }
    }

    void finish() {
        for (auto& [cls, bucket] : raw_) {
            const ClassDef* def = find_class(cls);
            auto& out = model_.objects[cls];
            for (auto& [key, raw] : bucket) {
                DssObject obj;
                obj.name = raw.name;
                if (cls == "transformer") gather_windings(raw);
                std::size_t n = 3;
                for (const char* pk : {"nphases", "phases"}) {
                    if (auto it = raw.props.find(pk); it != raw.props.end()) {
                        n = static_cast<std::size_t>(parse_number(it->second.text));
                        break;
                    }
                }
                for (const auto& [pk, pv] : raw.props) {
                    ValueKind kind = ValueKind::Text;
                    if (def) {
                        if (const PropertyDef* pd = def->find(pk)) kind = pd->kind;
                    }
                    try {
                        obj.properties[pk] = parse_value(kind, pv.text, n);
                    } catch (const ParseError& e) {
                        throw ParseError(cls + "." + raw.name + " " + pk + ": " + e.what(), pv.location);
                    }
                }
                out.emplace(key, std::move(obj));
            }
        }
    }

    static void gather_windings(RawObject& raw) {
        int windings = 2;
        if (auto it = raw.props.find("windings"); it != raw.props.end()) {
            windings = static_cast<int>(parse_number(it->second.text));
        }
        static const std::map<std::string, std::string> defaults = {
            {"conn", "wye"}, {"kv", "12.47"}, {"kva", "1000"}, {"tap", "1"}, {"%r", "0.2"},
        };
        for (std::string_view scalar : {"bus", "conn", "kv", "kva", "tap", "%r"}) {
            const std::string s(scalar);
            std::vector<std::string> items;
            SourceLocation loc;
            bool any = false;
            int highest = 0;
            for (const auto& [k, v] : raw.props) {
                if (k.rfind(s + "#", 0) == 0) highest = std::max(highest, std::stoi(k.substr(s.size() + 1)));
            }
            if (highest > windings) {
                throw ParseError("transformer " + raw.name + " sets " + s + " for winding " +
                                 std::to_string(highest) + " of " + std::to_string(windings),
                                 raw.props.at(s + "#" + std::to_string(highest)).location);
            }
            for (int k = 1; k <= windings; ++k) {
                auto it = raw.props.find(s + "#" + std::to_string(k));
                if (it != raw.props.end()) {
                    any = true;
                    loc = it->second.location;
                    items.push_back(it->second.text);
                    raw.props.erase(it);
                } else {
                    items.emplace_back();
                }
            }
            if (!any) continue;
            std::string joined = "[";
            for (int k = 0; k < windings; ++k) {
                std::string item = items[static_cast<std::size_t>(k)];
                if (item.empty()) {
                    if (s == "bus") {
                        throw ParseError("transformer " + raw.name + " winding " + std::to_string(k + 1) +
                                         " has no bus", loc);
                    }
                    // a winding-1 rating applies to windings left unset, as OpenDSS does
                    item = (s == "kva" && !items.front().empty()) ? items.front() : defaults.at(s);
                }
                joined += (k ? " " : "") + item;
            }
            raw.props[std::string(winding_array_name(s))] = {joined + "]", loc};
        }
    }

    void warn(std::string message) { model_.warnings.push_back(std::move(message)); }

    DssDataModel model_;
    std::map<std::string, std::map<std::string, RawObject>> raw_;
    std::set<std::string> warned_classes_;
};

}  // namespace

DssDataModel build_data_model(const std::vector<DssStatement>& statements) {
    return Builder().run(statements);
}

}  // namespace mcdist::dss
