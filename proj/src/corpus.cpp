#include "sketchiq/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <random>
#include <set>
#include <sstream>

#include "sketchiq/errors.hpp"
#include "sketchiq/image_io.hpp"
#include "sketchiq/random.hpp"

namespace sketchiq {

namespace {

// Every regular file must load as an image; anything else in the directory is
// an error rather than silently skipped.
std::vector<GalleryEntry> load_directory(const std::filesystem::path& dir) {
    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        if (!entry.is_regular_file())
            throw DataError("unexpected non-file entry " + entry.path().string());
        files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end(), [](const auto& a, const auto& b) {
        return a.filename().string() < b.filename().string();
    });
    std::vector<GalleryEntry> entries;
    std::set<std::string> seen;
    for (const auto& file : files) {
        const std::string id = file.stem().string();
        if (id.empty()) throw DataError("file with empty stem: " + file.string());
        if (!seen.insert(id).second)
            throw DataError("duplicate id \"" + id + "\" in " + dir.string());
        entries.push_back({id, load_image(file)});
    }
    return entries;
}

void check_uniform(const std::vector<GalleryEntry>& entries, const std::string& what) {
    for (const auto& entry : entries)
        if (!entry.image.same_shape(entries.front().image))
            throw ShapeError("mixed dimensions in " + what + " at \"" + entry.id + "\"");
}

std::vector<std::string> read_id_list(const std::filesystem::path& file,
                                      const std::set<std::string>& known) {
    std::ifstream in(file);
    if (!in) throw IoError("cannot open " + file.string());
    std::vector<std::string> ids;
    std::string line;
    while (std::getline(in, line)) {
        while (!line.empty() && (line.back() == '\r' || line.back() == ' ' || line.back() == '\t'))
            line.pop_back();
        std::size_t start = 0;
        while (start < line.size() && (line[start] == ' ' || line[start] == '\t')) ++start;
        line = line.substr(start);
        if (line.empty()) continue;
        if (!known.count(line))
            throw DataError("unknown id \"" + line + "\" in " + file.string());
        ids.push_back(line);
    }
    return ids;
}

std::string padded_id(int index, int identities) {
    int width = 3;
    for (int v = identities - 1; v >= 1000; v /= 10) ++width;
    std::ostringstream out;
    out << "id";
    out.width(width);
    out.fill('0');
    out << index;
    return out.str();
}

}  // namespace

void validate_corpus(const Corpus& corpus) {
    if (!corpus.photos.empty()) check_uniform(corpus.photos, "photos");
    if (!corpus.sketches.empty()) check_uniform(corpus.sketches, "sketches");
    std::set<std::string> photo_ids;
    for (const auto& e : corpus.photos) {
        if (!photo_ids.insert(e.id).second) throw DataError("duplicate photo id \"" + e.id + "\"");
    }
    std::set<std::string> sketch_ids;
    for (const auto& e : corpus.sketches) sketch_ids.insert(e.id);
    for (const auto& id : photo_ids)
        if (!sketch_ids.count(id)) throw DataError("photo \"" + id + "\" has no sketch mate");
    for (const auto& id : sketch_ids)
        if (!photo_ids.count(id)) throw DataError("sketch \"" + id + "\" has no photo mate");
    for (const auto& [method, entries] : corpus.synthesized) {
        if (!entries.empty()) check_uniform(entries, "synth/" + method);
        for (const auto& e : entries)
            if (!photo_ids.count(e.id))
                throw DataError("synthesized id \"" + e.id + "\" (" + method +
                                ") has no photo mate");
    }
}

Corpus load_corpus(const std::filesystem::path& root) {
    if (!std::filesystem::is_directory(root))
        throw IoError("corpus root " + root.string() + " is not a directory");
    const auto photos_dir = root / "photos";
    const auto sketches_dir = root / "sketches";
    if (!std::filesystem::is_directory(photos_dir))
        throw DataError("missing directory " + photos_dir.string());
    if (!std::filesystem::is_directory(sketches_dir))
        throw DataError("missing directory " + sketches_dir.string());

    Corpus corpus;
    corpus.root = root;
    corpus.photos = load_directory(photos_dir);
    corpus.sketches = load_directory(sketches_dir);

    const auto synth_root = root / "synth";
    if (std::filesystem::is_directory(synth_root)) {
        std::vector<std::filesystem::path> methods;
        for (const auto& entry : std::filesystem::directory_iterator(synth_root)) {
            if (!entry.is_directory())
                throw DataError("unexpected non-directory entry " + entry.path().string());
            methods.push_back(entry.path());
        }
        std::sort(methods.begin(), methods.end());
        for (const auto& dir : methods)
            corpus.synthesized[dir.filename().string()] = load_directory(dir);
    }

    std::set<std::string> ids;
    for (const auto& e : corpus.photos) ids.insert(e.id);
    const auto train_file = root / "splits" / "train.txt";
    if (std::filesystem::is_regular_file(train_file))
        corpus.train_ids = read_id_list(train_file, ids);
    const auto test_file = root / "splits" / "test.txt";
    if (std::filesystem::is_regular_file(test_file))
        corpus.test_ids = read_id_list(test_file, ids);

    validate_corpus(corpus);
    return corpus;
}

Corpus load_corpus_flat(const std::filesystem::path& root) {
    if (!std::filesystem::is_directory(root))
        throw IoError("corpus root " + root.string() + " is not a directory");
    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::directory_iterator(root)) {
        if (!entry.is_regular_file())
            throw DataError("unexpected non-file entry " + entry.path().string());
        files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end(), [](const auto& a, const auto& b) {
        return a.filename().string() < b.filename().string();
    });

    Corpus corpus;
    corpus.root = root;
    for (const auto& file : files) {
        const std::string stem = file.stem().string();
        const auto split = [&](const std::string& suffix) {
            return stem.size() > suffix.size() &&
                   stem.compare(stem.size() - suffix.size(), suffix.size(), suffix) == 0;
        };
        if (split("_photo")) {
            corpus.photos.push_back(
                {stem.substr(0, stem.size() - 6), load_image(file)});
        } else if (split("_sketch")) {
            corpus.sketches.push_back(
                {stem.substr(0, stem.size() - 7), load_image(file)});
        } else {
            throw DataError("file " + file.string() +
                            " matches neither <id>_photo nor <id>_sketch");
        }
    }
    validate_corpus(corpus);
    return corpus;
}

GrayImage sketch_from_photo(const GrayImage& photo) {
    const GrayImage grad = gradient_magnitude(photo, GradientOperator::Scharr);
    double peak = 0.0;
    for (std::size_t t = 0; t < grad.size(); ++t) peak = std::max(peak, grad.data()[t]);
    std::vector<double> sk(grad.size(), 255.0);
    if (peak > 0.0)
        for (std::size_t t = 0; t < grad.size(); ++t)
            sk[t] = 255.0 - 255.0 * grad.data()[t] / peak;
    return GrayImage::from_data(grad.rows(), grad.cols(), std::move(sk));
}

Corpus make_synthetic_corpus(int identities, int size, std::uint64_t seed) {
    if (identities < 2) throw ParamError("identities must be >= 2");
    if (size < 32) throw ParamError("size must be >= 32");

    Corpus corpus;
    for (int i = 0; i < identities; ++i) {
        std::mt19937_64 rng(mix_seed(seed, static_cast<std::uint64_t>(i)));
        struct Wave {
            double fx, fy, amp, phase;
        };
        std::vector<Wave> waves(6);
        for (auto& w : waves) {
            w.fx = 0.5 + 3.0 * uniform_real(rng);
            w.fy = 0.5 + 3.0 * uniform_real(rng);
            w.amp = 20.0 + 25.0 * uniform_real(rng);
            w.phase = 2.0 * std::numbers::pi * uniform_real(rng);
        }
        std::vector<double> px(static_cast<std::size_t>(size) * size);
        for (int r = 0; r < size; ++r) {
            for (int c = 0; c < size; ++c) {
                double v = 128.0;
                for (const auto& w : waves)
                    v += w.amp * std::sin(2.0 * std::numbers::pi *
                                              (w.fx * c / size + w.fy * r / size) +
                                          w.phase);
                v += 3.0 * gaussian(rng);
                px[static_cast<std::size_t>(r) * size + c] = std::clamp(v, 0.0, 255.0);
            }
        }
        GrayImage photo = GrayImage::from_data(size, size, std::move(px));
        GrayImage sketch = sketch_from_photo(photo);

        const std::string id = padded_id(i, identities);
        corpus.photos.push_back({id, std::move(photo)});
        corpus.sketches.push_back({id, std::move(sketch)});
    }
    return corpus;
}

void write_corpus(const Corpus& corpus, const std::filesystem::path& root) {
    std::filesystem::create_directories(root / "photos");
    std::filesystem::create_directories(root / "sketches");
    for (const auto& e : corpus.photos) save_png(e.image, root / "photos" / (e.id + ".png"));
    for (const auto& e : corpus.sketches) save_png(e.image, root / "sketches" / (e.id + ".png"));
    for (const auto& [method, entries] : corpus.synthesized) {
        std::filesystem::create_directories(root / "synth" / method);
        for (const auto& e : entries)
            save_png(e.image, root / "synth" / method / (e.id + ".png"));
    }
    if (!corpus.train_ids.empty() || !corpus.test_ids.empty())
        std::filesystem::create_directories(root / "splits");
    if (!corpus.train_ids.empty()) {
        std::string text;
        for (const auto& id : corpus.train_ids) text += id + "\n";
        write_file_atomic(root / "splits" / "train.txt", text);
    }
    if (!corpus.test_ids.empty()) {
        std::string text;
        for (const auto& id : corpus.test_ids) text += id + "\n";
        write_file_atomic(root / "splits" / "test.txt", text);
    }
}

}  // namespace sketchiq
