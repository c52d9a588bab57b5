// tools/make_data_files.cpp

// Copyright 2026  The speechground Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

// Regenerates the derived files shipped in data/: the confusion table built
// from lexicon.tsv and the phoneme spectral templates.

#include <cstdio>
#include <filesystem>

#include "speechground/phonetics.hpp"

int main(int argc, char **argv) {
  namespace sg = speechground;
  if (argc > 2) {
    std::fprintf(stderr, "usage: %s [data-dir]\n", argv[0]);
    return 2;
  }
  const std::filesystem::path dir = argc == 2 ? std::filesystem::path(argv[1]) : sg::DataDir();
  try {
    sg::Lexicon lexicon = sg::Lexicon::Load(dir / "lexicon.tsv");
    sg::ConfusionTable::Build(lexicon).Save(dir / "confusions.tsv");
    sg::PhonemeTemplates::Generate().Save(dir / "phoneme_templates.bin");
  } catch (const std::exception &e) {
    std::fprintf(stderr, "make-data-files: %s\n", e.what());
    return 1;
  }
  std::printf("wrote %s and %s\n", (dir / "confusions.tsv").c_str(),
              (dir / "phoneme_templates.bin").c_str());
  return 0;
}
