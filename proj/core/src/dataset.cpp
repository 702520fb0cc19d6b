#include "glyphrec/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "glyphrec/errors.hpp"
#include "glyphrec/rng.hpp"
#include "glyphrec/serialize.hpp"

namespace fs = std::filesystem;

namespace glyphrec {

std::vector<std::string> default_class_names(int count) {
    std::vector<std::string> names;
    names.reserve(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) {
        char buf[16];
        std::snprintf(buf, sizeof(buf), "class%02d", i);
        names.emplace_back(buf);
    }
    return names;
}

namespace {

void validate_manifest(const DatasetManifest& m, const std::string& origin) {
    if (m.entries.empty()) throw NoSamples("manifest " + origin + ": no entries");
    std::vector<std::string> paths;
    paths.reserve(m.entries.size());
    for (const auto& e : m.entries) {
        if (e.label < 0 || e.label >= kMaxClasses ||
            e.label >= static_cast<int>(m.class_names.size()))
            throw BadLabel("manifest " + origin + ": label " +
                           std::to_string(e.label) + " out of range for entry " +
                           e.path);
        paths.push_back(e.path);
    }
    std::sort(paths.begin(), paths.end());
    if (std::adjacent_find(paths.begin(), paths.end()) != paths.end())
        throw ConfigInvalid("manifest " + origin + ": duplicate entry paths");
}

DatasetManifest ingest_directory(const fs::path& root) {
    std::vector<fs::path> class_dirs;
    for (const auto& entry : fs::directory_iterator(root))
        if (entry.is_directory()) class_dirs.push_back(entry.path());
    std::sort(class_dirs.begin(), class_dirs.end());
    if (static_cast<int>(class_dirs.size()) > kMaxClasses)
        throw BadLabel("ingest: " + std::to_string(class_dirs.size()) +
                       " class folders exceed the " +
                       std::to_string(kMaxClasses) + " class limit");

    DatasetManifest manifest;
    for (std::size_t label = 0; label < class_dirs.size(); ++label) {
        manifest.class_names.push_back(class_dirs[label].filename().string());
        std::vector<fs::path> files;
        for (const auto& entry : fs::directory_iterator(class_dirs[label]))
            if (entry.is_regular_file() && entry.path().extension() == ".pgm")
                files.push_back(entry.path());
        std::sort(files.begin(), files.end());
        for (const auto& f : files)
            manifest.entries.push_back(
                {f.string(), static_cast<int>(label), "own"});
    }
    return manifest;
}

}  // namespace

DatasetManifest load_manifest(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open manifest " + path);
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw FormatError("manifest " + path + ": " + e.what());
    }
    DatasetManifest manifest;
    const fs::path base = fs::path(path).parent_path();
    try {
        for (const auto& name : doc.at("class_names"))
            manifest.class_names.push_back(name.get<std::string>());
        for (const auto& row : doc.at("entries")) {
            ManifestEntry e;
            e.path = row.at("path").get<std::string>();
            e.label = row.at("label").get<int>();
            e.source = row.value("source", "own");
            fs::path p(e.path);
            if (p.is_relative()) e.path = (base / p).lexically_normal().string();
            manifest.entries.push_back(std::move(e));
        }
    } catch (const nlohmann::json::exception& e) {
        throw FormatError("manifest " + path + ": " + e.what());
    }
    validate_manifest(manifest, path);
    return manifest;
}

void save_manifest(const DatasetManifest& manifest, const std::string& path) {
    validate_manifest(manifest, path);
    const fs::path base = fs::path(path).parent_path();
    nlohmann::json doc;
    doc["class_names"] = manifest.class_names;
    auto& entries = doc["entries"] = nlohmann::json::array();
    for (const auto& e : manifest.entries) {
        std::string stored = e.path;
        std::error_code ec;
        const fs::path rel = fs::relative(e.path, base, ec);
        if (!ec && !rel.empty() && rel.native().rfind("..", 0) != 0)
            stored = rel.string();
        entries.push_back(
            {{"path", stored}, {"label", e.label}, {"source", e.source}});
    }
    write_file_atomic(path, doc.dump(2) + "\n");
}

DatasetManifest ingest(const std::string& root_or_manifest) {
    const fs::path p(root_or_manifest);
    if (!fs::exists(p)) throw IoError("ingest: " + root_or_manifest + " not found");
    DatasetManifest manifest = fs::is_directory(p)
                                   ? ingest_directory(p)
                                   : load_manifest(root_or_manifest);
    if (manifest.entries.empty())
        throw NoSamples("ingest: no samples under " + root_or_manifest);
    validate_manifest(manifest, root_or_manifest);
    std::string unreadable;
    for (const auto& e : manifest.entries) {
        try {
            load_pgm(e.path);
        } catch (const Error& err) {
            unreadable += "\n  " + e.path + ": " + err.what();
        }
    }
    if (!unreadable.empty())
        throw UnreadableImage("ingest: unreadable images:" + unreadable);
    return manifest;
}

SplitResult split(const DatasetManifest& manifest, const SplitSpec& spec) {
    if (spec.train_fraction <= 0.0 || spec.train_fraction >= 1.0 ||
        spec.selection_fraction < 0.0 ||
        spec.train_fraction + spec.selection_fraction >= 1.0)
        throw ConfigInvalid("split: fractions must satisfy 0 < train, 0 <= "
                            "selection, train + selection < 1");

    auto cut = [&spec](std::vector<std::size_t>& pool, SplitResult& out,
                       bool per_class) {
        const std::size_t n = pool.size();
        std::size_t n_train = static_cast<std::size_t>(
            std::floor(n * spec.train_fraction + 0.5));
        std::size_t n_sel = static_cast<std::size_t>(
            std::floor(n * spec.selection_fraction + 0.5));
        if (n_train + n_sel > n) n_sel = n - n_train;
        if (per_class) {
            if (n_train == 0)
                throw ClassTooSmall("split: a class has no training samples");
            if (spec.selection_fraction > 0.0 && n_sel == 0)
                throw ClassTooSmall("split: a class has no selection samples");
        }
        for (std::size_t i = 0; i < n; ++i) {
            if (i < n_train)
                out.train.push_back(pool[i]);
            else if (i < n_train + n_sel)
                out.selection.push_back(pool[i]);
            else
                out.test.push_back(pool[i]);
        }
    };

    SplitResult out;
    if (spec.stratified) {
        int max_label = 0;
        for (const auto& e : manifest.entries)
            max_label = std::max(max_label, e.label);
        for (int label = 0; label <= max_label; ++label) {
            std::vector<std::size_t> pool;
            for (std::size_t i = 0; i < manifest.entries.size(); ++i)
                if (manifest.entries[i].label == label) pool.push_back(i);
            if (pool.empty()) continue;
            Rng rng(derive_seed(spec.seed, 1 + static_cast<std::uint64_t>(label)));
            rng.shuffle(pool);
            cut(pool, out, true);
        }
    } else {
        std::vector<std::size_t> pool(manifest.entries.size());
        for (std::size_t i = 0; i < pool.size(); ++i) pool[i] = i;
        Rng rng(derive_seed(spec.seed, 0));
        rng.shuffle(pool);
        cut(pool, out, false);
    }
    return out;
}

ScalerModel fit_scaler(const std::vector<std::vector<double>>& rows) {
    if (rows.empty()) throw EmptyDataset("fit_scaler: no rows");
    const std::size_t dim = rows[0].size();
    ScalerModel scaler;
    scaler.min.assign(dim, 0.0);
    scaler.max.assign(dim, 0.0);
    for (std::size_t j = 0; j < dim; ++j) {
        scaler.min[j] = rows[0][j];
        scaler.max[j] = rows[0][j];
    }
    for (const auto& row : rows) {
        if (row.size() != dim)
            throw DimensionMismatch("fit_scaler: ragged feature rows");
        for (std::size_t j = 0; j < dim; ++j) {
            scaler.min[j] = std::min(scaler.min[j], row[j]);
            scaler.max[j] = std::max(scaler.max[j], row[j]);
        }
    }
    return scaler;
}

std::vector<double> apply_scaler(const ScalerModel& scaler,
                                 const std::vector<double>& x) {
    if (x.size() != scaler.min.size())
        throw DimensionMismatch("apply_scaler: dimension mismatch");
    std::vector<double> out(x.size());
    for (std::size_t j = 0; j < x.size(); ++j) {
        const double range = scaler.max[j] - scaler.min[j];
        double v = range > 0.0 ? (x[j] - scaler.min[j]) / range : 0.0;
        if (scaler.clamp) v = std::clamp(v, 0.0, 1.0);
        out[j] = v;
    }
    return out;
}

namespace {

struct Segment {
    double x0, y0, x1, y1, radius;
};

struct Ring {
    double cx, cy, r, half_width;
};

struct Disc {
    double cx, cy, r;
};

struct GlyphTemplate {
    std::vector<Segment> segments;
    std::vector<Ring> rings;
    std::vector<Disc> discs;
};

double segment_distance(const Segment& s, double px, double py) {
    const double dx = s.x1 - s.x0, dy = s.y1 - s.y0;
    const double len2 = dx * dx + dy * dy;
    double t = len2 > 0.0 ? ((px - s.x0) * dx + (py - s.y0) * dy) / len2 : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    const double qx = s.x0 + t * dx - px;
    const double qy = s.y0 + t * dy - py;
    return std::sqrt(qx * qx + qy * qy);
}

// Class templates compose one of 7 primary strokes with one of 7 secondary
// marks, giving 49 distinct shapes on the 100x100 canvas.
GlyphTemplate class_template(int cls) {
    GlyphTemplate t;
    const int primary = cls % 7;
    const int secondary = cls / 7;
    const double pr = 4.0;
    switch (primary) {
        case 0: t.segments.push_back({50, 15, 50, 85, pr}); break;
        case 1: t.segments.push_back({15, 50, 85, 50, pr}); break;
        case 2: t.segments.push_back({20, 20, 80, 80, pr}); break;
        case 3: t.segments.push_back({80, 20, 20, 80, pr}); break;
        case 4: t.rings.push_back({50, 50, 32, pr}); break;
        case 5:
            t.segments.push_back({25, 20, 50, 80, pr});
            t.segments.push_back({75, 20, 50, 80, pr});
            break;
        case 6:
            t.segments.push_back({20, 20, 80, 80, pr});
            t.segments.push_back({80, 20, 20, 80, pr});
            break;
    }
    const double sr = 3.0;
    switch (secondary) {
        case 0: break;
        case 1: t.segments.push_back({25, 8, 75, 8, sr}); break;
        case 2: t.segments.push_back({25, 92, 75, 92, sr}); break;
        case 3: t.segments.push_back({8, 25, 8, 75, sr}); break;
        case 4: t.segments.push_back({92, 25, 92, 75, sr}); break;
        case 5: t.discs.push_back({74, 10, 5}); break;
        case 6: t.rings.push_back({12, 12, 6, sr}); break;
    }
    return t;
}

bool template_hit(const GlyphTemplate& t, double x, double y) {
    for (const auto& s : t.segments)
        if (segment_distance(s, x, y) <= s.radius) return true;
    for (const auto& r : t.rings) {
        const double d = std::hypot(x - r.cx, y - r.cy);
        if (std::fabs(d - r.r) <= r.half_width) return true;
    }
    for (const auto& d : t.discs)
        if (std::hypot(x - d.cx, y - d.cy) <= d.r) return true;
    return false;
}

BinaryImage render_glyph(int cls, Rng& rng, double noise) {
    const GlyphTemplate tmpl = class_template(cls);
    // Forward affine: rotate, shear and scale about the canvas center, then
    // translate. Pixels are tested through the inverse map.
    const double sx = rng.next_double(0.9, 1.1);
    const double sy = rng.next_double(0.9, 1.1);
    const double rot = rng.next_double(-0.1, 0.1);
    const double shear = rng.next_double(-0.1, 0.1);
    const double tx = rng.next_double(-5.0, 5.0);
    const double ty = rng.next_double(-5.0, 5.0);

    const double cr = std::cos(rot), sn = std::sin(rot);
    // A = R(rot) * [[1, shear], [0, 1]] * diag(sx, sy)
    const double a00 = cr * sx, a01 = (cr * shear - sn) * sy;
    const double a10 = sn * sx, a11 = (sn * shear + cr) * sy;
    const double det = a00 * a11 - a01 * a10;
    const double i00 = a11 / det, i01 = -a01 / det;
    const double i10 = -a10 / det, i11 = a00 / det;

    BinaryImage img(100, 100);
    for (int r = 0; r < 100; ++r) {
        for (int c = 0; c < 100; ++c) {
            const double dx = c + 0.5 - 50.0 - tx;
            const double dy = r + 0.5 - 50.0 - ty;
            const double x = i00 * dx + i01 * dy + 50.0;
            const double y = i10 * dx + i11 * dy + 50.0;
            if (template_hit(tmpl, x, y)) img.set(r, c, true);
        }
    }
    if (noise > 0.0) {
        for (auto& p : img.pixels)
            if (rng.next_double() < noise) p ^= 1;
    }
    return img;
}

}  // namespace

SynthResult synth_glyphs(int classes, int per_class, double noise,
                         std::uint64_t seed) {
    if (classes < 1 || classes > kMaxClasses)
        throw InvalidArgument("synth_glyphs: classes must be in [1," +
                              std::to_string(kMaxClasses) + "]");
    if (per_class < 0) throw InvalidArgument("synth_glyphs: negative per_class");
    if (noise < 0.0 || noise >= 1.0)
        throw InvalidArgument("synth_glyphs: noise must be in [0,1)");

    SynthResult out;
    out.manifest.class_names = default_class_names(classes);
    for (int cls = 0; cls < classes; ++cls) {
        for (int i = 0; i < per_class; ++i) {
            const std::uint64_t stream =
                static_cast<std::uint64_t>(cls) * 1000003ull +
                static_cast<std::uint64_t>(i);
            Rng rng(derive_seed(seed, stream));
            out.images.push_back(render_glyph(cls, rng, noise));
            out.labels.push_back(cls);
            char name[48];
            std::snprintf(name, sizeof(name), "class_%02d/glyph_%04d.pgm", cls, i);
            out.manifest.entries.push_back({name, cls, "synthetic"});
        }
    }
    return out;
}

void write_synth_dataset(SynthResult& synth, const std::string& dir) {
    const fs::path root(dir);
    fs::create_directories(root);
    for (std::size_t i = 0; i < synth.images.size(); ++i) {
        const fs::path target = root / synth.manifest.entries[i].path;
        fs::create_directories(target.parent_path());
        save_pgm(target.string(), to_gray(synth.images[i]));
        synth.manifest.entries[i].path = target.string();
    }
    save_manifest(synth.manifest, (root / "manifest.json").string());
}

void save_feature_matrix(const std::string& path, FeatureKind kind,
                         const std::vector<LabeledSample>& rows) {
    const int dim = dimension(kind);
    std::ostringstream out;
    out << "glyphrec-features 1\n";
    out << "kind " << to_string(kind) << "\n";
    out << "dimension " << dim << "\n";
    out << "count " << rows.size() << "\n";
    char buf[40];
    for (const auto& row : rows) {
        if (static_cast<int>(row.x.size()) != dim)
            throw DimensionMismatch("save_feature_matrix: row size mismatch");
        out << row.label;
        for (double v : row.x) {
            std::snprintf(buf, sizeof(buf), " %.17g", v);
            out << buf;
        }
        out << "\n";
    }
    write_file_atomic(path, out.str());
}

std::pair<FeatureKind, std::vector<LabeledSample>> load_feature_matrix(
    const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open feature matrix " + path);
    std::string magic;
    int version = 0;
    if (!(in >> magic >> version) || magic != "glyphrec-features" || version != 1)
        throw FormatError("feature matrix " + path + ": bad header");
    std::string key, kind_name;
    int dim = 0;
    std::size_t count = 0;
    if (!(in >> key >> kind_name) || key != "kind")
        throw FormatError("feature matrix " + path + ": missing kind");
    if (!(in >> key >> dim) || key != "dimension")
        throw FormatError("feature matrix " + path + ": missing dimension");
    if (!(in >> key >> count) || key != "count")
        throw FormatError("feature matrix " + path + ": missing count");
    const FeatureKind kind = feature_kind_from_string(kind_name);
    if (dim != dimension(kind))
        throw FormatError("feature matrix " + path + ": dimension mismatch");
    std::vector<LabeledSample> rows(count);
    for (auto& row : rows) {
        if (!(in >> row.label))
            throw FormatError("feature matrix " + path + ": truncated rows");
        row.x.resize(static_cast<std::size_t>(dim));
        for (auto& v : row.x)
            if (!(in >> v))
                throw FormatError("feature matrix " + path + ": truncated row");
    }
    return {kind, std::move(rows)};
}

}  // namespace glyphrec
