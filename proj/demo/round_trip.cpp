// Encrypts a P5 image into (r, n) containers, lets every data hider embed a
// short message, and rebuilds the image from the first r marked containers.
//
//   cfss_demo image.pgm [r n]

#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include "cfss/cfss.hpp"

int main(int argc, char** argv) {
  if (argc != 2 && argc != 4) {
    std::cerr << "usage: " << argv[0] << " image.pgm [r n]\n";
    return 2;
  }
  const unsigned r = argc == 4 ? static_cast<unsigned>(std::atoi(argv[2])) : 3;
  const unsigned n = argc == 4 ? static_cast<unsigned>(std::atoi(argv[3])) : 4;

  try {
    const cfss::GrayImage image = cfss::read_pgm(argv[1]);
    const auto key = cfss::EncryptionKey::from_hex("3a7bd3e2360a3d29eea436fcfb7e44c735d117c42d1c1835420b6b9942dd4f1b");
    const auto data_key = cfss::EncryptionKey::from_hex("0123456789abcdef0123456789abcdef0123456789abcdef0123456789abcdef");

    cfss::EntropySource entropy(2024);
    auto containers = cfss::owner_encrypt(image, key, r, n, entropy);
    std::cout << "level " << containers.front().level << ", " << n << " containers of " << containers.front().rows << "x"
              << containers.front().cols << " pixels\n";

    for (auto& c : containers) {
      const std::string message = "hidden by data hider " + std::to_string(c.identity);
      cfss::BitString bits;
      for (unsigned char ch : message) bits.append(ch, 8);
      std::cout << "share " << c.identity << ": entropy " << cfss::shannon_entropy(c.as_image()) << ", capacity "
                << cfss::payload_capacity(c) << " bits, ER " << cfss::embedding_rate(c) << " bpp\n";
      c = cfss::hider_embed(c, bits, data_key);

      const cfss::BitString back = cfss::extract_data(c, data_key);
      std::string text;
      cfss::BitReader in(back);
      while (in.remaining() >= 8) text.push_back(static_cast<char>(in.read(8)));
      std::cout << "  extracted: " << text << '\n';
    }

    const std::vector<cfss::ShareContainer> subset(containers.begin(), containers.begin() + r);
    const cfss::GrayImage rebuilt = cfss::reconstruct(subset, key, n);
    std::cout << "reconstruction from " << r << " marked shares is " << (rebuilt == image ? "bit-exact" : "WRONG") << '\n';
    return rebuilt == image ? 0 : 1;
  } catch (const cfss::Error& e) {
    std::cerr << e.what() << '\n';
    return 1;
  }
}
