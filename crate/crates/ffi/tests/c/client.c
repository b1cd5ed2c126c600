#include <stdio.h>
#include <string.h>

#include "circlecount.h"

/* One red disk of radius 30 on gray. */
int main(void) {
    enum { W = 120, H = 100 };
    static uint8_t rgb[W * H * 3];
    for (int y = 0; y < H; y++) {
        for (int x = 0; x < W; x++) {
            uint8_t *p = &rgb[(y * W + x) * 3];
            int dx = x - 60, dy = y - 50;
            if (dx * dx + dy * dy <= 30 * 30) {
                p[0] = 220; p[1] = 30; p[2] = 30;
            } else {
                p[0] = p[1] = p[2] = 150;
            }
        }
    }

    CcImage *img = NULL;
    if (cc_image_from_rgb(W, H, rgb, sizeof rgb, &img) != CC_STATUS_OK) return 1;

    CcConfig *cfg = cc_config_new();
    if (cc_config_set_otsu_classes(cfg, 3) != CC_STATUS_INVALID_ARGUMENT) return 2;
    if (cc_last_error_message() == NULL) return 3;
    if (cc_config_set_tone_map(cfg, CC_TONE_MAP_CLASS_MEAN) != CC_STATUS_OK) return 4;

    CcReport *report = NULL;
    if (cc_count(img, cfg, &report) != CC_STATUS_OK) return 5;
    CcCircle c;
    if (cc_report_circle(report, 0, &c) != CC_STATUS_OK) return 6;
    printf("count=%zu circle=%u %u %u\n", cc_report_count(report), c.cx, c.cy, c.radius);

    cc_report_free(report);
    cc_config_free(cfg);
    cc_image_free(img);
    return 0;
}
