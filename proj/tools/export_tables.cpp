// Regenerates the versioned data files shipped under data/.
#include <iostream>

#include "qcvv/clifford_table.hpp"
#include "qcvv/gst/design.hpp"
#include "qcvv/io.hpp"

int main(int argc, char** argv) {
    const std::filesystem::path dir = argc > 1 ? argv[1] : QCVV_DATA_DIR;
    qcvv::write_json_file(dir / "clifford_table_v1.json", qcvv::clifford_table_to_json(qcvv::CliffordGroup::standard()));
    qcvv::write_json_file(dir / "extended_germs_v1.json", qcvv::gst::germ_catalog_json(qcvv::gst::extended_design()));
    std::cout << "wrote " << dir.string() << "\n";
}
