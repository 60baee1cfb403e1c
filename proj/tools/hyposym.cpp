#include <iostream>

#include "hyposym/cli.hpp"

int main(int argc, char** argv) {
  using namespace hyposym;
  const auto parsed = parse_config(argc, argv);
  if (!parsed.ok) {
    (parsed.exit_code == exit_pass ? std::cout : std::cerr) << parsed.message;
    return parsed.exit_code;
  }
  try {
    const auto rep = run(parsed.config);
    if (parsed.config.out.empty()) std::cout << rep.doc.dump(2) << '\n';
    if (rep.doc.contains("components")) {
      for (const auto& c : rep.doc["components"]) {
        std::cerr << (c["ok"].get<bool>() ? "ok   " : "FAIL ") << c["name"].get<std::string>()
                  << " observed=" << c["observed"] << " expected=" << c["expected"];
        if (c.contains("error")) std::cerr << " error=" << c["error"].get<std::string>();
        std::cerr << '\n';
      }
    }
    std::cerr << (rep.pass ? "PASS" : "FAIL") << '\n';
    return rep.exit_code;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_fail;
  }
}
