enum color { RED, GREEN, BLUE };

struct flags {
	unsigned lo : 2;
	unsigned mid : 3;
	int neg : 3;
};

struct point {
	int x;
	int y;
};

struct node {
	int value;
	struct point *where;
	struct node *next;
	char tag[4];
};

struct segment {
	struct point from;
	struct point *to;
};

typedef struct point point_t;

enum color shade = GREEN;
enum color odd;
struct flags bits;
struct point origin = { 3, -4 };
struct node second = { 2, 0, 0, "b" };
struct node first = { 1, &origin, &second, "a" };
struct segment span = { { 1, 2 }, &origin };
char greeting[8] = "hi";
double ratio = 0.5;
float third = 0.25;
unsigned big = 4000000000u;
short small = -7;
char letter = 'q';
int numbers[3] = { 10, -20, 30 };

int main(void) {
	point_t local;

	local.x = 8;
	local.y = 9;
	bits.lo = 1;
	bits.mid = 5;
	bits.neg = -2;
	odd = 7;
	print_int(first.value + local.x);
	return 0;
}
