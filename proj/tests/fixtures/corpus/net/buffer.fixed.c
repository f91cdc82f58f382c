#include <string.h>

struct buffer {
    char data[64];
    size_t used;
};

static void reset(struct buffer *b) {
    b->used = 0;
}

static int append(struct buffer *b, const char *s) {
    size_t n = strlen(s);
    if (b->used + n > sizeof b->data) {
        return -1;
    }
    memcpy(b->data + b->used, s, n);
    b->used += n;
    return 0;
}

int fill(struct buffer *b, const char *a, const char *c) {
    reset(b);
    if (append(b, a) != 0) {
        return -1;
    }
    return append(b, c);
}
