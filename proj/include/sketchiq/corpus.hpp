#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "sketchiq/recognition.hpp"

namespace sketchiq {

// A paired photo/sketch dataset on disk:
//   root/photos/<id>.<ext>      root/sketches/<id>.<ext>
//   root/synth/<method>/<id>.<ext>       (optional, one dir per method)
//   root/splits/train.txt, test.txt      (optional, one id per line)
// Ids are filename stems; collections are kept in lexicographic id order.
struct Corpus {
    std::filesystem::path root;
    std::vector<GalleryEntry> photos;
    std::vector<GalleryEntry> sketches;
    std::map<std::string, std::vector<GalleryEntry>> synthesized;
    std::vector<std::string> train_ids;
    std::vector<std::string> test_ids;
};

// Uniform dimensions inside each collection, photo/sketch id sets equal,
// synthesized ids a subset of photo ids. Throws DataError / ShapeError.
void validate_corpus(const Corpus& corpus);

Corpus load_corpus(const std::filesystem::path& root);

// Fallback layout: one flat directory of <id>_photo.<ext> / <id>_sketch.<ext>.
Corpus load_corpus_flat(const std::filesystem::path& root);

// Deterministic stand-in artist: 255 minus the peak-normalized Scharr gradient
// magnitude. A gradient-free photo maps to an all-255 sketch.
GrayImage sketch_from_photo(const GrayImage& photo);

// Seeded in-memory corpus: photos are sums of random low-frequency sinusoids
// plus noise; drawn sketches come from sketch_from_photo.
Corpus make_synthetic_corpus(int identities, int size, std::uint64_t seed);

// Writes photos/, sketches/, any synthesized sets, and split files under root.
void write_corpus(const Corpus& corpus, const std::filesystem::path& root);

}  // namespace sketchiq
